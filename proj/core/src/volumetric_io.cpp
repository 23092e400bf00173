#include "dsg/volumetric_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace dsg {

Json scan_to_json(const Scan& scan) {
  Json rays = Json::array();
  for (const auto& r : scan.rays) {
    rays.push_back({{"dir", vec3_to_json(r.direction)},
                    {"range", r.range},
                    {"label", r.label},
                    {"mask", r.dynamic_mask}});
  }
  return Json{{"t", scan.t}, {"pose", pose_to_json(scan.sensor_pose)}, {"rays", std::move(rays)}};
}

Scan scan_from_json(const Json& j) {
  try {
    Scan scan;
    scan.t = require(j, "t").get<double>();
    scan.sensor_pose = pose_from_json(require(j, "pose"));
    const Json& rays = require(j, "rays");
    scan.rays.reserve(rays.size());
    for (const auto& jr : rays) {
      Ray r;
      r.direction = vec3_from_json(require(jr, "dir"));
      r.range = require(jr, "range").get<double>();
      r.label = require(jr, "label").get<ClassId>();
      r.dynamic_mask = require(jr, "mask").get<bool>();
      scan.rays.push_back(r);
    }
    return scan;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed scan: ") + e.what());
  }
}

void write_scans(std::ostream& out, const std::vector<Scan>& scans) {
  for (const auto& s : scans) {
    out << scan_to_json(s).dump() << '\n';
  }
}

std::vector<Scan> read_scans(std::istream& in) {
  std::vector<Scan> scans;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError("scan stream line " + std::to_string(line_no) + ": " + e.what());
    }
    scans.push_back(scan_from_json(j));
  }
  return scans;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "grid dump I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw ParseError("grid dump truncated");
  }
  return value;
}

}  // namespace

void write_grid_dump(const std::filesystem::path& path, const TsdfLayer& tsdf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  const VoxelGrid& grid = tsdf.grid();
  for (int a = 0; a < 3; ++a) {
    put<double>(out, grid.origin()[a]);
  }
  put<double>(out, grid.voxel_size());
  for (int a = 0; a < 3; ++a) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dims()[a]));
  }
  std::vector<float> distances(tsdf.size());
  std::vector<std::uint16_t> weights(tsdf.size());
  for (std::size_t l = 0; l < tsdf.size(); ++l) {
    distances[l] = tsdf.distance(l);
    weights[l] = static_cast<std::uint16_t>(std::clamp(tsdf.weight(l), 0.0F, 65535.0F));
  }
  out.write(reinterpret_cast<const char*>(distances.data()),
            static_cast<std::streamsize>(distances.size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(weights.data()),
            static_cast<std::streamsize>(weights.size() * sizeof(std::uint16_t)));
}

TsdfLayer read_grid_dump(const std::filesystem::path& path, double truncation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open grid dump " + path.string());
  }
  Vec3 origin;
  for (int a = 0; a < 3; ++a) {
    origin[a] = take<double>(in);
  }
  const double voxel_size = take<double>(in);
  Eigen::Vector3i dims;
  for (int a = 0; a < 3; ++a) {
    dims[a] = static_cast<int>(take<std::uint32_t>(in));
  }
  if (!(voxel_size > 0.0) || (dims.array() <= 0).any()) {
    throw ParseError("grid dump header is invalid");
  }
  TsdfLayer tsdf(VoxelGrid(origin, voxel_size, dims), truncation);
  const std::size_t n = tsdf.grid().size();
  std::vector<float> dist(n);
  std::vector<std::uint16_t> weight(n);
  if (!in.read(reinterpret_cast<char*>(dist.data()), static_cast<std::streamsize>(n * 4)) ||
      !in.read(reinterpret_cast<char*>(weight.data()), static_cast<std::streamsize>(n * 2))) {
    throw ParseError("grid dump truncated");
  }
  for (std::size_t l = 0; l < n; ++l) {
    tsdf.set(l, dist[l], static_cast<float>(weight[l]));
  }
  return tsdf;
}

}  // namespace dsg
