#include "dsg/surface.hpp"

#include "dsg/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace dsg {

std::array<std::uint8_t, 3> class_color(ClassId id) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 14> kPalette = {{
      {128, 128, 128},  // unknown
      {140, 110, 80},   // floor
      {230, 230, 230},  // ceiling
      {200, 190, 170},  // wall
      {160, 160, 160},  // pillar
      {220, 60, 60},    // chair
      {60, 140, 220},   // table
      {120, 60, 160},   // sofa
      {90, 170, 90},    // cabinet
      {230, 160, 40},   // desk
      {0, 200, 220},    // human
      {250, 250, 0},    // robot
      {100, 100, 255},  // room
      {50, 50, 50},     // building
  }};
  return id < kPalette.size() ? kPalette[id] : kPalette[0];
}

namespace {

Vec3 gradient_at(const TsdfLayer& tsdf, const GridIndex& i) {
  const VoxelGrid& grid = tsdf.grid();
  Vec3 g = Vec3::Zero();
  for (int a = 0; a < 3; ++a) {
    GridIndex lo = i;
    GridIndex hi = i;
    (a == 0 ? lo.x : a == 1 ? lo.y : lo.z) -= 1;
    (a == 0 ? hi.x : a == 1 ? hi.y : hi.z) += 1;
    const std::size_t c = grid.linear(i);
    const bool lo_ok = grid.in_bounds(lo) && tsdf.observed(grid.linear(lo));
    const bool hi_ok = grid.in_bounds(hi) && tsdf.observed(grid.linear(hi));
    if (lo_ok && hi_ok) {
      g[a] = 0.5 * (tsdf.distance(grid.linear(hi)) - tsdf.distance(grid.linear(lo)));
    } else if (hi_ok) {
      g[a] = tsdf.distance(grid.linear(hi)) - tsdf.distance(c);
    } else if (lo_ok) {
      g[a] = tsdf.distance(c) - tsdf.distance(grid.linear(lo));
    }
  }
  return g;
}

struct EdgeKey {
  std::size_t voxel;
  int axis;
  bool operator==(const EdgeKey&) const = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& k) const noexcept { return k.voxel * 3 + k.axis; }
};

}  // namespace

Mesh extract_surface(const TsdfLayer& tsdf) {
  const VoxelGrid& grid = tsdf.grid();
  const auto& dims = grid.dims();
  Mesh mesh;
  std::unordered_map<EdgeKey, std::uint32_t, EdgeKeyHash> edge_vertex;

  for (int z = 0; z < dims.z(); ++z) {
    for (int y = 0; y < dims.y(); ++y) {
      for (int x = 0; x < dims.x(); ++x) {
        const GridIndex i0{x, y, z};
        const std::size_t l0 = grid.linear(i0);
        if (!tsdf.observed(l0)) {
          continue;
        }
        const float d0 = tsdf.distance(l0);
        for (int axis = 0; axis < 3; ++axis) {
          GridIndex i1 = i0;
          (axis == 0 ? i1.x : axis == 1 ? i1.y : i1.z) += 1;
          if (!grid.in_bounds(i1)) {
            continue;
          }
          const std::size_t l1 = grid.linear(i1);
          if (!tsdf.observed(l1)) {
            continue;
          }
          const float d1 = tsdf.distance(l1);
          if ((d0 < 0.0F) == (d1 < 0.0F)) {
            continue;
          }
          const double t = static_cast<double>(d0) / (static_cast<double>(d0) - d1);
          MeshVertexAttr v;
          v.position = grid.center(i0) + t * (grid.center(i1) - grid.center(i0));
          Vec3 n = (1.0 - t) * gradient_at(tsdf, i0) + t * gradient_at(tsdf, i1);
          if (n.norm() < 1e-12) {
            n = Vec3::Zero();
            n[axis] = d1 > d0 ? 1.0 : -1.0;
          }
          v.normal = n.normalized();
          LabelCounts counts = tsdf.labels(l0);
          const LabelCounts other = tsdf.labels(l1);
          for (std::size_t c = 0; c < counts.size(); ++c) {
            counts[c] = static_cast<std::uint16_t>(
                std::min<int>(counts[c] + other[c], std::numeric_limits<std::uint16_t>::max()));
          }
          v.label = argmax_label(counts);
          v.color = class_color(v.label);
          edge_vertex.emplace(EdgeKey{l0, axis}, static_cast<std::uint32_t>(mesh.vertices.size()));
          mesh.vertices.push_back(v);
        }
      }
    }
  }

  // cells are keyed by their minimum-corner voxel
  std::unordered_set<std::size_t> cells;
  cells.reserve(edge_vertex.size() * 2);
  for (const auto& [key, vid] : edge_vertex) {
    const GridIndex i = grid.unlinear(key.voxel);
    const int a1 = (key.axis + 1) % 3;
    const int a2 = (key.axis + 2) % 3;
    for (int o1 = 0; o1 <= 1; ++o1) {
      for (int o2 = 0; o2 <= 1; ++o2) {
        GridIndex c = i;
        int* comp[3] = {&c.x, &c.y, &c.z};
        *comp[a1] -= o1;
        *comp[a2] -= o2;
        if (grid.in_bounds(c)) {
          cells.insert(grid.linear(c));
        }
      }
    }
  }
  std::vector<std::size_t> ordered(cells.begin(), cells.end());
  std::sort(ordered.begin(), ordered.end());

  std::vector<std::uint32_t> ring;
  for (std::size_t cell : ordered) {
    const GridIndex c = grid.unlinear(cell);
    ring.clear();
    for (int axis = 0; axis < 3; ++axis) {
      const int a1 = (axis + 1) % 3;
      const int a2 = (axis + 2) % 3;
      for (int o1 = 0; o1 <= 1; ++o1) {
        for (int o2 = 0; o2 <= 1; ++o2) {
          GridIndex e = c;
          int* comp[3] = {&e.x, &e.y, &e.z};
          *comp[a1] += o1;
          *comp[a2] += o2;
          if (!grid.in_bounds(e)) {
            continue;
          }
          auto it = edge_vertex.find({grid.linear(e), axis});
          if (it != edge_vertex.end()) {
            ring.push_back(it->second);
          }
        }
      }
    }
    if (ring.size() < 3) {
      continue;
    }
    Vec3 centroid = Vec3::Zero();
    Vec3 normal = Vec3::Zero();
    for (auto v : ring) {
      centroid += mesh.vertices[v].position;
      normal += mesh.vertices[v].normal;
    }
    centroid /= static_cast<double>(ring.size());
    if (normal.norm() < 1e-9) {
      normal = Vec3::UnitZ();
    }
    normal.normalize();
    const Vec3 u = normal.unitOrthogonal();
    const Vec3 w = normal.cross(u);
    std::vector<std::pair<double, std::uint32_t>> by_angle;
    by_angle.reserve(ring.size());
    for (auto v : ring) {
      const Vec3 d = mesh.vertices[v].position - centroid;
      by_angle.emplace_back(std::atan2(d.dot(w), d.dot(u)), v);
    }
    std::sort(by_angle.begin(), by_angle.end());
    for (std::size_t k = 1; k + 1 < by_angle.size(); ++k) {
      mesh.faces.push_back({by_angle[0].second, by_angle[k].second, by_angle[k + 1].second});
    }
  }
  return mesh;
}

std::vector<Vec3> vertex_positions(const Mesh& mesh) {
  std::vector<Vec3> out;
  out.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) {
    out.push_back(v.position);
  }
  return out;
}

double mesh_error(std::span<const Vec3> estimated, std::span<const Vec3> reference) {
  if (estimated.empty() || reference.empty()) {
    throw std::invalid_argument("mesh_error needs non-empty surfaces");
  }
  Aabb box;
  for (const auto& p : reference) {
    box.extend(p);
  }
  const double span = box.extent().maxCoeff();
  const double cell = std::max(0.02, span / 200.0);
  const PointIndex index(reference, cell);
  double sum = 0.0;
  for (const auto& p : estimated) {
    const auto nn = index.nearest(p);
    sum += (index.point(*nn) - p).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(estimated.size()));
}

}  // namespace dsg
