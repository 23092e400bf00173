#pragma once

#include "dsg/json_util.hpp"
#include "dsg/tsdf.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dsg {

/// {t, pose:{p,q}, rays:[{dir, range, label, mask}]}
Json scan_to_json(const Scan& scan);
Scan scan_from_json(const Json& j);

/// JSON-lines scan stream, one scan per line.
void write_scans(std::ostream& out, const std::vector<Scan>& scans);
std::vector<Scan> read_scans(std::istream& in);

/// Binary grid dump, little-endian:
///   origin (3 x f64), voxel_size (f64), dims (3 x u32),
///   distance (N x f32), weight (N x u16, saturating).
void write_grid_dump(const std::filesystem::path& path, const TsdfLayer& tsdf);
/// Restores distances/weights (labels are not part of the dump).
TsdfLayer read_grid_dump(const std::filesystem::path& path, double truncation);

}  // namespace dsg
