#pragma once

#include "dsg/geometry.hpp"
#include "dsg/semantics.hpp"
#include "dsg/voxel_grid.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

namespace dsg {

/// One depth sample: unit direction in the sensor frame, range along it,
/// the semantic class of the hit, and whether the hit belongs to a dynamic
/// agent (masked rays only carve free space).
struct Ray {
  Vec3 direction = Vec3::UnitX();
  double range = 0.0;
  ClassId label = classes::kUnknown;
  bool dynamic_mask = false;
};

struct Scan {
  double t = 0.0;
  Pose sensor_pose;
  std::vector<Ray> rays;
};

using LabelCounts = std::array<std::uint16_t, kNumVoxelClasses>;

struct TsdfVoxel {
  float distance = 0.0F;
  float weight = 0.0F;
  LabelCounts label_counts{};
};

/// Truncated signed distance layer with per-voxel class counts.
///
/// Distances and weights are dense and interleaved. Label counts are stored in 8^3 blocks
/// allocated the first time a voxel in the block falls inside a truncation
/// band, so free space costs no label memory.
class TsdfLayer {
 public:
  static constexpr int kBlockSide = 8;

  TsdfLayer() = default;
  TsdfLayer(const VoxelGrid& grid, double truncation);

  [[nodiscard]] const VoxelGrid& grid() const { return grid_; }
  [[nodiscard]] double truncation() const { return truncation_; }

  [[nodiscard]] float distance(std::size_t l) const { return cells_[l].distance; }
  [[nodiscard]] float weight(std::size_t l) const { return cells_[l].weight; }
  [[nodiscard]] bool observed(std::size_t l) const { return cells_[l].weight > 0.0F; }
  [[nodiscard]] std::size_t size() const { return cells_.size(); }
  [[nodiscard]] LabelCounts labels(std::size_t l) const;
  [[nodiscard]] TsdfVoxel voxel(const GridIndex& i) const;
  [[nodiscard]] std::size_t num_label_blocks() const { return label_blocks_.size(); }

  /// Weighted running-average update with unit weight.
  void update(std::size_t l, float sdf);
  void add_label(std::size_t l, ClassId label);
  /// Overwrites a voxel (analytic fills and dump loading).
  void set(std::size_t l, float distance, float weight);


 private:
  using LabelBlock = std::array<LabelCounts, kBlockSide * kBlockSide * kBlockSide>;
  [[nodiscard]] std::size_t block_of(std::size_t l, std::size_t* within) const;

  VoxelGrid grid_;
  double truncation_ = 0.2;
  struct Cell {
    float distance = 0.0F;
    float weight = 0.0F;
  };
  std::vector<Cell> cells_;
  Eigen::Vector3i block_dims_ = Eigen::Vector3i::Zero();
  std::vector<std::int32_t> block_slot_;
  std::deque<LabelBlock> label_blocks_;
};

/// Fuses one scan. Unmasked rays update every voxel whose projected signed
/// distance is at least -truncation (clamped to +truncation) and count the
/// ray label inside the band; masked rays only update voxels strictly in
/// front of range - truncation. Out-of-grid voxels are skipped. Throws
/// std::invalid_argument on non-finite or non-positive ranges/directions.
void integrate_scan(TsdfLayer& tsdf, const Scan& scan);

/// Argmax over label counts, ties resolved to the lowest class id. Returns
/// kUnknown when all counts are zero.
[[nodiscard]] ClassId argmax_label(const LabelCounts& counts);

}  // namespace dsg
