#pragma once

#include "dsg/tsdf.hpp"
#include "dsg/voxel_grid.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace dsg {

/// Unsigned Euclidean distance from each voxel center to the nearest
/// occupied voxel center, capped at max_distance. Occupied voxels hold 0.
class EsdfGrid {
 public:
  EsdfGrid() = default;
  EsdfGrid(const VoxelGrid& grid, double max_distance, std::vector<float> distance)
      : grid_(grid), max_distance_(max_distance), distance_(std::move(distance)) {}

  [[nodiscard]] const VoxelGrid& grid() const { return grid_; }
  [[nodiscard]] double max_distance() const { return max_distance_; }
  [[nodiscard]] float at(const GridIndex& i) const { return distance_[grid_.linear(i)]; }
  [[nodiscard]] float at(std::size_t l) const { return distance_[l]; }
  /// Value of the voxel containing p; 0 outside the grid.
  [[nodiscard]] double at_world(const Vec3& p) const;
  [[nodiscard]] const std::vector<float>& values() const { return distance_; }

 private:
  VoxelGrid grid_;
  double max_distance_ = 0.0;
  std::vector<float> distance_;
};

/// Occupancy used for distance fields: unobserved voxels (weight 0) and
/// observed voxels behind a surface (distance < 0) are occupied.
[[nodiscard]] std::vector<std::uint8_t> occupancy(const TsdfLayer& tsdf);

/// Exact Euclidean distance transform (separable lower-envelope method,
/// squared distances in integer voxel units), scaled by voxel size.
[[nodiscard]] EsdfGrid compute_esdf(const VoxelGrid& grid, std::span<const std::uint8_t> occupied,
                                    double max_distance);
[[nodiscard]] EsdfGrid compute_esdf(const TsdfLayer& tsdf, double max_distance);

/// Conversion shared with tests: integer squared voxel distance to meters.
[[nodiscard]] inline float esdf_value(double squared_voxels, double voxel_size,
                                      double max_distance) {
  const double d = std::sqrt(squared_voxels) * voxel_size;
  return static_cast<float>(d < max_distance ? d : max_distance);
}

}  // namespace dsg
