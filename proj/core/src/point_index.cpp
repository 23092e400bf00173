#include "dsg/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsg {

PointIndex::PointIndex(std::span<const Vec3> points, double cell_size)
    : points_(points.begin(), points.end()), cell_(cell_size) {
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("PointIndex cell size must be positive");
  }
  lo_ = {std::numeric_limits<std::int32_t>::max(), std::numeric_limits<std::int32_t>::max(),
         std::numeric_limits<std::int32_t>::max()};
  hi_ = {std::numeric_limits<std::int32_t>::min(), std::numeric_limits<std::int32_t>::min(),
         std::numeric_limits<std::int32_t>::min()};
  cells_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const CellKey k = key(points_[i]);
    cells_[k].push_back(static_cast<std::uint32_t>(i));
    lo_ = {std::min(lo_.x, k.x), std::min(lo_.y, k.y), std::min(lo_.z, k.z)};
    hi_ = {std::max(hi_.x, k.x), std::max(hi_.y, k.y), std::max(hi_.z, k.z)};
  }
}

CellKey PointIndex::key(const Vec3& p) const {
  return {static_cast<std::int32_t>(std::floor(p.x() / cell_)),
          static_cast<std::int32_t>(std::floor(p.y() / cell_)),
          static_cast<std::int32_t>(std::floor(p.z() / cell_))};
}

std::vector<std::size_t> PointIndex::radius(const Vec3& query, double r) const {
  std::vector<std::size_t> out;
  if (points_.empty()) {
    return out;
  }
  const CellKey a = key(query - Vec3::Constant(r));
  const CellKey b = key(query + Vec3::Constant(r));
  const double r2 = r * r;
  for (std::int32_t x = std::max(a.x, lo_.x); x <= std::min(b.x, hi_.x); ++x) {
    for (std::int32_t y = std::max(a.y, lo_.y); y <= std::min(b.y, hi_.y); ++y) {
      for (std::int32_t z = std::max(a.z, lo_.z); z <= std::min(b.z, hi_.z); ++z) {
        auto it = cells_.find({x, y, z});
        if (it == cells_.end()) {
          continue;
        }
        for (std::uint32_t i : it->second) {
          if ((points_[i] - query).squaredNorm() <= r2) {
            out.push_back(i);
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> PointIndex::nearest(const Vec3& query) const {
  if (points_.empty()) {
    return std::nullopt;
  }
  const CellKey c = key(query);
  std::optional<std::size_t> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  const std::int32_t max_ring =
      std::max({std::abs(c.x - lo_.x), std::abs(c.x - hi_.x), std::abs(c.y - lo_.y),
                std::abs(c.y - hi_.y), std::abs(c.z - lo_.z), std::abs(c.z - hi_.z)});
  for (std::int32_t ring = 0; ring <= max_ring; ++ring) {
    // every point in ring r is at least (r - 1) * cell away
    if (best && static_cast<double>(ring - 1) * cell_ > std::sqrt(best_d2)) {
      break;
    }
    for (std::int32_t x = c.x - ring; x <= c.x + ring; ++x) {
      for (std::int32_t y = c.y - ring; y <= c.y + ring; ++y) {
        const bool side = std::abs(x - c.x) == ring || std::abs(y - c.y) == ring;
        const std::int32_t step = side || ring == 0 ? 1 : 2 * ring;
        for (std::int32_t z = c.z - ring; z <= c.z + ring; z += step) {
          auto it = cells_.find({x, y, z});
          if (it == cells_.end()) {
            continue;
          }
          for (std::uint32_t i : it->second) {
            const double d2 = (points_[i] - query).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && i < *best)) {
              best_d2 = d2;
              best = i;
            }
          }
        }
      }
    }
  }
  return best;
}

std::vector<std::size_t> PointIndex::knn(const Vec3& query, std::size_t k,
                                         double max_radius) const {
  auto candidates = radius(query, max_radius);
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    const double da = (points_[a] - query).squaredNorm();
    const double db = (points_[b] - query).squaredNorm();
    return da < db || (da == db && a < b);
  });
  if (candidates.size() > k) {
    candidates.resize(k);
  }
  return candidates;
}

}  // namespace dsg
