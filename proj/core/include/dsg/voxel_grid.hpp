#pragma once

#include "dsg/geometry.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace dsg {

struct GridIndex {
  int x = 0;
  int y = 0;
  int z = 0;
  bool operator==(const GridIndex&) const = default;
};

/// Dense regular lattice: voxel (i, j, k) spans origin + [i, i+1) * voxel_size
/// on each axis and is represented by its center.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Vec3& origin, double voxel_size, const Eigen::Vector3i& dims)
      : origin_(origin), voxel_size_(voxel_size), dims_(dims) {
    if (!(voxel_size > 0.0)) {
      throw std::invalid_argument("voxel size must be positive");
    }
    if ((dims.array() <= 0).any()) {
      throw std::invalid_argument("grid dimensions must be positive");
    }
  }

  /// Smallest grid aligned to multiples of voxel_size covering [lo, hi].
  static VoxelGrid covering(const Vec3& lo, const Vec3& hi, double voxel_size);

  [[nodiscard]] const Vec3& origin() const { return origin_; }
  [[nodiscard]] double voxel_size() const { return voxel_size_; }
  [[nodiscard]] const Eigen::Vector3i& dims() const { return dims_; }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z();
  }

  [[nodiscard]] bool in_bounds(const GridIndex& i) const {
    return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < dims_.x() && i.y < dims_.y() &&
           i.z < dims_.z();
  }
  [[nodiscard]] std::size_t linear(const GridIndex& i) const {
    return (static_cast<std::size_t>(i.z) * dims_.y() + i.y) * dims_.x() + i.x;
  }
  [[nodiscard]] GridIndex unlinear(std::size_t l) const {
    const auto nx = static_cast<std::size_t>(dims_.x());
    const auto ny = static_cast<std::size_t>(dims_.y());
    return {static_cast<int>(l % nx), static_cast<int>((l / nx) % ny),
            static_cast<int>(l / (nx * ny))};
  }
  /// Voxel containing a world point (may be out of bounds).
  [[nodiscard]] GridIndex index_of(const Vec3& p) const {
    const Vec3 q = (p - origin_) / voxel_size_;
    return {static_cast<int>(std::floor(q.x())), static_cast<int>(std::floor(q.y())),
            static_cast<int>(std::floor(q.z()))};
  }
  [[nodiscard]] Vec3 center(const GridIndex& i) const {
    return origin_ + voxel_size_ * Vec3(i.x + 0.5, i.y + 0.5, i.z + 0.5);
  }
  [[nodiscard]] Vec3 max_corner() const { return origin_ + voxel_size_ * dims_.cast<double>(); }

  bool operator==(const VoxelGrid& o) const {
    return origin_ == o.origin_ && voxel_size_ == o.voxel_size_ && dims_ == o.dims_;
  }

 private:
  Vec3 origin_ = Vec3::Zero();
  double voxel_size_ = 0.05;
  Eigen::Vector3i dims_ = Eigen::Vector3i::Ones();
};

}  // namespace dsg
