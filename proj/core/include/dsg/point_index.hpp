#pragma once

#include "dsg/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace dsg {

/// Integer lattice cell key.
struct CellKey {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    return (static_cast<std::size_t>(k.x) * 73856093u) ^
           (static_cast<std::size_t>(k.y) * 19349663u) ^
           (static_cast<std::size_t>(k.z) * 83492791u);
  }
};

/// Uniform-grid spatial hash over a fixed point set. Radius queries are exact
/// (closed ball); nearest-neighbour search expands rings until provably done.
class PointIndex {
 public:
  PointIndex(std::span<const Vec3> points, double cell_size);

  [[nodiscard]] double cell_size() const { return cell_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const Vec3& point(std::size_t i) const { return points_[i]; }

  /// Indices of points within `radius` of `query` (inclusive), ascending.
  [[nodiscard]] std::vector<std::size_t> radius(const Vec3& query, double radius) const;
  /// Index of the nearest point, or nullopt for an empty index.
  [[nodiscard]] std::optional<std::size_t> nearest(const Vec3& query) const;
  /// Up to k nearest points within max_radius, sorted by distance then index.
  [[nodiscard]] std::vector<std::size_t> knn(const Vec3& query, std::size_t k,
                                             double max_radius) const;

  [[nodiscard]] CellKey key(const Vec3& p) const;

 private:
  std::vector<Vec3> points_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> cells_;
  CellKey lo_{};
  CellKey hi_{};
};

}  // namespace dsg
