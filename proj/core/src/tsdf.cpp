#include "dsg/tsdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsg {

VoxelGrid VoxelGrid::covering(const Vec3& lo, const Vec3& hi, double voxel_size) {
  Vec3 origin;
  Eigen::Vector3i dims;
  for (int a = 0; a < 3; ++a) {
    const double first = std::floor(lo[a] / voxel_size + 1e-9);
    const double last = std::ceil(hi[a] / voxel_size - 1e-9);
    origin[a] = first * voxel_size;
    dims[a] = std::max(1, static_cast<int>(last - first));
  }
  return {origin, voxel_size, dims};
}

TsdfLayer::TsdfLayer(const VoxelGrid& grid, double truncation)
    : grid_(grid),
      truncation_(truncation),
      cells_(grid.size()) {
  if (!(truncation > 0.0)) {
    throw std::invalid_argument("truncation must be positive");
  }
  for (int a = 0; a < 3; ++a) {
    block_dims_[a] = (grid.dims()[a] + kBlockSide - 1) / kBlockSide;
  }
  block_slot_.assign(static_cast<std::size_t>(block_dims_.prod()), -1);
}

std::size_t TsdfLayer::block_of(std::size_t l, std::size_t* within) const {
  const GridIndex i = grid_.unlinear(l);
  const int bx = i.x / kBlockSide;
  const int by = i.y / kBlockSide;
  const int bz = i.z / kBlockSide;
  *within = static_cast<std::size_t>(((i.z % kBlockSide) * kBlockSide + (i.y % kBlockSide)) *
                                         kBlockSide +
                                     (i.x % kBlockSide));
  return (static_cast<std::size_t>(bz) * block_dims_.y() + by) * block_dims_.x() + bx;
}

LabelCounts TsdfLayer::labels(std::size_t l) const {
  std::size_t within = 0;
  const std::size_t b = block_of(l, &within);
  const std::int32_t slot = block_slot_[b];
  if (slot < 0) {
    return LabelCounts{};
  }
  return label_blocks_[static_cast<std::size_t>(slot)][within];
}

TsdfVoxel TsdfLayer::voxel(const GridIndex& i) const {
  const std::size_t l = grid_.linear(i);
  return {cells_[l].distance, cells_[l].weight, labels(l)};
}

void TsdfLayer::update(std::size_t l, float sdf) {
  Cell& c = cells_[l];
  c.distance = (c.distance * c.weight + sdf) / (c.weight + 1.0F);
  c.weight += 1.0F;
}

void TsdfLayer::add_label(std::size_t l, ClassId label) {
  if (label >= kNumVoxelClasses) {
    return;
  }
  std::size_t within = 0;
  const std::size_t b = block_of(l, &within);
  std::int32_t& slot = block_slot_[b];
  if (slot < 0) {
    slot = static_cast<std::int32_t>(label_blocks_.size());
    label_blocks_.emplace_back();
    label_blocks_.back().fill(LabelCounts{});
  }
  auto& count = label_blocks_[static_cast<std::size_t>(slot)][within][label];
  if (count < std::numeric_limits<std::uint16_t>::max()) {
    ++count;
  }
}

void TsdfLayer::set(std::size_t l, float distance, float weight) {
  cells_[l] = {distance, weight};
}

ClassId argmax_label(const LabelCounts& counts) {
  ClassId best = classes::kUnknown;
  std::uint16_t best_count = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > best_count) {
      best_count = counts[c];
      best = static_cast<ClassId>(c);
    }
  }
  return best;
}

void integrate_scan(TsdfLayer& tsdf, const Scan& scan) {
  const VoxelGrid& grid = tsdf.grid();
  const double tau = tsdf.truncation();
  const double vs = grid.voxel_size();
  const double step = 0.5 * vs;
  const Vec3 origin = scan.sensor_pose.translation;
  const Mat3 rot = scan.sensor_pose.rotation_matrix();
  if (!origin.allFinite()) {
    throw std::invalid_argument("scan pose is not finite");
  }
  const Vec3 q0 = (origin - grid.origin()) / vs;
  const Eigen::Vector3i dims = grid.dims();
  const auto nx = static_cast<std::size_t>(dims.x());
  const auto nxy = nx * static_cast<std::size_t>(dims.y());
  for (const Ray& ray : scan.rays) {
    if (!std::isfinite(ray.range) || !(ray.range > 0.0) || !ray.direction.allFinite() ||
        std::abs(ray.direction.norm() - 1.0) > 1e-6) {
      throw std::invalid_argument("scan ray has a non-finite or invalid range/direction");
    }
    const Vec3 dir = rot * ray.direction;
    const Vec3 dq = dir / vs;
    const double s_end = ray.dynamic_mask ? ray.range - tau : ray.range + tau;
    // offset of voxel centers along the ray, in meters, relative to the origin
    const double c0 = -(q0.dot(dir)) * vs;
    std::size_t last = std::numeric_limits<std::size_t>::max();
    const auto n = static_cast<long>(std::floor(s_end / step));
    for (long k = 0; k <= n; ++k) {
      const double s = static_cast<double>(k) * step;
      const int ix = static_cast<int>(std::floor(q0.x() + s * dq.x()));
      const int iy = static_cast<int>(std::floor(q0.y() + s * dq.y()));
      const int iz = static_cast<int>(std::floor(q0.z() + s * dq.z()));
      if (ix < 0 || iy < 0 || iz < 0 || ix >= dims.x() || iy >= dims.y() || iz >= dims.z()) {
        continue;
      }
      const std::size_t l = static_cast<std::size_t>(iz) * nxy + static_cast<std::size_t>(iy) * nx +
                            static_cast<std::size_t>(ix);
      if (l == last) {
        continue;
      }
      last = l;
      const double along = c0 + vs * ((ix + 0.5) * dir.x() + (iy + 0.5) * dir.y() +
                                      (iz + 0.5) * dir.z());
      const double sdf = ray.range - along;
      if (ray.dynamic_mask) {
        if (sdf > tau) {
          tsdf.update(l, static_cast<float>(tau));
        }
        continue;
      }
      if (sdf < -tau) {
        continue;
      }
      tsdf.update(l, static_cast<float>(std::min(sdf, tau)));
      if (sdf < tau) {
        tsdf.add_label(l, ray.label);
      }
    }
  }
}

}  // namespace dsg
