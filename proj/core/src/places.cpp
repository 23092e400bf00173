#include "dsg/point_index.hpp"
#include "dsg/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsg {

bool segment_clear(const EsdfGrid& esdf, const Vec3& a, const Vec3& b, double clearance) {
  // walks every voxel the segment touches, so any finer sampling agrees
  const VoxelGrid& grid = esdf.grid();
  GridIndex cur = grid.index_of(a);
  const GridIndex last = grid.index_of(b);
  const Vec3 d = b - a;
  int step[3];
  double t_max[3];
  double t_delta[3];
  int* idx[3] = {&cur.x, &cur.y, &cur.z};
  for (int k = 0; k < 3; ++k) {
    const double lo = grid.origin()[k] + *idx[k] * grid.voxel_size();
    if (d[k] > 0.0) {
      step[k] = 1;
      t_max[k] = (lo + grid.voxel_size() - a[k]) / d[k];
      t_delta[k] = grid.voxel_size() / d[k];
    } else if (d[k] < 0.0) {
      step[k] = -1;
      t_max[k] = (lo - a[k]) / d[k];
      t_delta[k] = -grid.voxel_size() / d[k];
    } else {
      step[k] = 0;
      t_max[k] = std::numeric_limits<double>::infinity();
      t_delta[k] = std::numeric_limits<double>::infinity();
    }
  }
  while (true) {
    if (!grid.in_bounds(cur) || esdf.at(cur) < clearance) {
      return false;
    }
    if (cur == last) {
      return true;
    }
    int k = 0;
    if (t_max[1] < t_max[k]) {
      k = 1;
    }
    if (t_max[2] < t_max[k]) {
      k = 2;
    }
    if (t_max[k] > 1.0) {
      // rounding left the final voxel unreached; it was checked by index
      return grid.in_bounds(last) && esdf.at(last) >= clearance;
    }
    *idx[k] += step[k];
    t_max[k] += t_delta[k];
  }
}

PlaceGraph extract_places(const EsdfGrid& esdf, const PlaceConfig& cfg) {
  if (!(cfg.spacing > 0.0) || !(cfg.edge_radius > 0.0)) {
    throw std::invalid_argument("place spacing and edge radius must be positive");
  }
  const VoxelGrid& grid = esdf.grid();
  const auto& values = esdf.values();
  const auto min_clear = static_cast<float>(cfg.min_clearance);
  struct Candidate {
    float d;
    std::uint32_t l;
  };
  std::vector<Candidate> candidates;
  for (std::size_t l = 0; l < values.size(); ++l) {
    if (values[l] >= min_clear && values[l] > 0.0F) {
      candidates.push_back({values[l], static_cast<std::uint32_t>(l)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.d != b.d ? a.d > b.d : a.l < b.l;
  });

  PlaceGraph out;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> buckets;
  const double cell = cfg.spacing;
  auto key_of = [cell](const Vec3& p) {
    return CellKey{static_cast<std::int32_t>(std::floor(p.x() / cell)),
                   static_cast<std::int32_t>(std::floor(p.y() / cell)),
                   static_cast<std::int32_t>(std::floor(p.z() / cell))};
  };
  const double spacing_sq = cfg.spacing * cfg.spacing;
  for (const auto& c : candidates) {
    const Vec3 p = grid.center(grid.unlinear(c.l));
    const CellKey k = key_of(p);
    bool blocked = false;
    for (int dz = -1; dz <= 1 && !blocked; ++dz) {
      for (int dy = -1; dy <= 1 && !blocked; ++dy) {
        for (int dx = -1; dx <= 1 && !blocked; ++dx) {
          const auto it = buckets.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == buckets.end()) {
            continue;
          }
          for (const auto n : it->second) {
            if ((out.nodes[n].position - p).squaredNorm() < spacing_sq) {
              blocked = true;
              break;
            }
          }
        }
      }
    }
    if (blocked) {
      continue;
    }
    buckets[k].push_back(static_cast<std::uint32_t>(out.nodes.size()));
    out.nodes.push_back({p, c.d});
  }

  std::vector<Vec3> positions;
  positions.reserve(out.nodes.size());
  for (const auto& n : out.nodes) {
    positions.push_back(n.position);
  }
  const PointIndex index(positions, cfg.edge_radius);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (const auto j : index.radius(positions[i], cfg.edge_radius)) {
      if (j > i && segment_clear(esdf, positions[i], positions[j], cfg.min_clearance)) {
        out.edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }
    }
  }
  return out;
}

}  // namespace dsg
