#pragma once

#include "dsg/scene_graph.hpp"
#include "dsg/tsdf.hpp"

#include <array>
#include <span>
#include <vector>

namespace dsg {

/// Display color for a semantic class.
[[nodiscard]] std::array<std::uint8_t, 3> class_color(ClassId id);

/// Zero-crossing surface of a TSDF: one vertex per sign-changing lattice
/// edge between two observed voxels, placed by linear interpolation. Each
/// lattice cell crossed by the surface contributes a fan of triangles over
/// its edge vertices (a quad split in two for planar crossings).
[[nodiscard]] Mesh extract_surface(const TsdfLayer& tsdf);

[[nodiscard]] std::vector<Vec3> vertex_positions(const Mesh& mesh);

/// RMSE over `estimated` of the distance to the nearest `reference` point.
/// Throws std::invalid_argument when either set is empty.
[[nodiscard]] double mesh_error(std::span<const Vec3> estimated, std::span<const Vec3> reference);

}  // namespace dsg
