#include "dsg/esdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas rooted at finite samples; writes the squared
// distance transform of f into out. Infinite samples take no part.
void transform_line(const double* f, double* out, int n, std::vector<int>& v,
                    std::vector<double>& z) {
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) {
      continue;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
          (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
        if (k < 0) {
          break;
        }
        continue;
      }
      break;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) {
      out[q] = kInf;
    }
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) {
      ++k;
    }
    const double d = q - v[k];
    out[q] = d * d + f[v[k]];
  }
}

}  // namespace

double EsdfGrid::at_world(const Vec3& p) const {
  const GridIndex i = grid_.index_of(p);
  if (!grid_.in_bounds(i)) {
    return 0.0;
  }
  return at(i);
}

std::vector<std::uint8_t> occupancy(const TsdfLayer& tsdf) {
  const std::size_t n = tsdf.grid().size();
  std::vector<std::uint8_t> occ(n, 0);
  for (std::size_t l = 0; l < n; ++l) {
    occ[l] = (!tsdf.observed(l) || tsdf.distance(l) < 0.0F) ? 1 : 0;
  }
  return occ;
}

EsdfGrid compute_esdf(const VoxelGrid& grid, std::span<const std::uint8_t> occupied,
                      double max_distance) {
  if (occupied.size() != grid.size()) {
    throw std::invalid_argument("occupancy size does not match grid");
  }
  const int nx = grid.dims().x();
  const int ny = grid.dims().y();
  const int nz = grid.dims().z();
  std::vector<double> sq(grid.size());
  for (std::size_t l = 0; l < sq.size(); ++l) {
    sq[l] = occupied[l] != 0 ? 0.0 : kInf;
  }
  const int longest = std::max({nx, ny, nz});
  std::vector<int> v(static_cast<std::size_t>(longest));
  std::vector<double> z(static_cast<std::size_t>(longest) + 1);
  std::vector<double> in(static_cast<std::size_t>(longest));
  std::vector<double> out(static_cast<std::size_t>(longest));

  auto pass = [&](int n, int count_a, int count_b, auto index) {
    for (int a = 0; a < count_a; ++a) {
      for (int b = 0; b < count_b; ++b) {
        for (int q = 0; q < n; ++q) {
          in[q] = sq[index(q, a, b)];
        }
        transform_line(in.data(), out.data(), n, v, z);
        for (int q = 0; q < n; ++q) {
          sq[index(q, a, b)] = out[q];
        }
      }
    }
  };
  const auto sx = static_cast<std::size_t>(nx);
  const auto sxy = static_cast<std::size_t>(nx) * ny;
  pass(nx, ny, nz, [&](int q, int y, int zz) { return zz * sxy + y * sx + q; });
  pass(ny, nx, nz, [&](int q, int x, int zz) { return zz * sxy + q * sx + x; });
  pass(nz, nx, ny, [&](int q, int x, int y) { return q * sxy + y * sx + x; });

  std::vector<float> dist(grid.size());
  for (std::size_t l = 0; l < dist.size(); ++l) {
    dist[l] = sq[l] == kInf ? static_cast<float>(max_distance)
                            : esdf_value(sq[l], grid.voxel_size(), max_distance);
  }
  return {grid, max_distance, std::move(dist)};
}

EsdfGrid compute_esdf(const TsdfLayer& tsdf, double max_distance) {
  const auto occ = occupancy(tsdf);
  return compute_esdf(tsdf.grid(), occ, max_distance);
}

}  // namespace dsg
