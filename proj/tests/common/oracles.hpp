#pragma once

// Independent reference implementations shared by unit and acceptance tests.

#include "dsg/esdf.hpp"
#include "dsg/pose_graph.hpp"
#include "dsg/scene_graph.hpp"
#include "dsg/tracking.hpp"
#include "support.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace dsg::test {

/// Minimum squared voxel distance to any occupied voxel, by exhaustive scan.
inline std::vector<float> brute_force_esdf(const VoxelGrid& grid,
                                           const std::vector<std::uint8_t>& occ,
                                           double max_distance) {
  std::vector<float> out(grid.size());
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const GridIndex a = grid.unlinear(l);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < grid.size(); ++m) {
      if (occ[m] == 0) {
        continue;
      }
      const GridIndex b = grid.unlinear(m);
      const double dx = a.x - b.x;
      const double dy = a.y - b.y;
      const double dz = a.z - b.z;
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    out[l] = std::isinf(best) ? static_cast<float>(max_distance)
                              : esdf_value(best, grid.voxel_size(), max_distance);
  }
  return out;
}

/// Random lattice with a random fill density; at least one dimension is 1..12.
inline std::pair<VoxelGrid, std::vector<std::uint8_t>> random_occupancy(std::mt19937& rng) {
  std::uniform_int_distribution<int> dim(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const VoxelGrid grid(random_vec(rng, -1.0, 1.0), 0.05 + 0.1 * u(rng),
                       Eigen::Vector3i(dim(rng), dim(rng), dim(rng)));
  std::vector<std::uint8_t> occ(grid.size());
  const double density = u(rng) * u(rng);
  for (auto& o : occ) {
    o = u(rng) < density ? 1 : 0;
  }
  return {grid, occ};
}

/// Components of the all-pairs distance graph by union-find, sorted.
inline std::vector<std::vector<std::size_t>> union_find_components(std::span<const Vec3> pts,
                                                                   double threshold) {
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      i = parent[i] = parent[parent[i]];
    }
    return i;
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if ((pts[i] - pts[j]).norm() <= threshold) {
        const std::size_t a = find(i);
        const std::size_t b = find(j);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    groups[find(i)].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) {
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Single-source shortest traversable distances by edge relaxation.
inline std::map<NodeId, double> bellman_ford(const SceneGraph& g, NodeId from) {
  const auto places = g.nodes_of<PlaceAttr>();
  std::map<NodeId, double> dist;
  for (const NodeId p : places) {
    dist[p] = std::numeric_limits<double>::infinity();
  }
  dist[from] = 0.0;
  for (std::size_t round = 0; round < places.size(); ++round) {
    bool changed = false;
    for (const auto& [eid, e] : g.edges()) {
      if (e.relation != Relation::kTraversable) {
        continue;
      }
      const double w =
          (g.get<PlaceAttr>(e.src).position - g.get<PlaceAttr>(e.dst).position).norm();
      for (const auto& [a, b] : {std::pair{e.src, e.dst}, {e.dst, e.src}}) {
        if (dist[a] + w < dist[b]) {
          dist[b] = dist[a] + w;
          changed = true;
        }
      }
    }
    if (!changed) {
      break;
    }
  }
  return dist;
}

/// Places scattered in a 10 m cube with random traversable edges.
inline SceneGraph random_place_graph(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(2, 25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SceneGraph g;
  const int n = count(rng);
  std::vector<NodeId> ids;
  for (int i = 0; i < n; ++i) {
    ids.push_back(g.add_node(PlaceAttr{random_vec(rng, 0.0, 10.0), 0.5, std::nullopt}));
  }
  const double p = 0.05 + 0.3 * u(rng);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u(rng) < p) {
        g.add_edge(ids[i], ids[j], Relation::kTraversable);
      }
    }
  }
  return g;
}

/// Track with one detection per measurement, 0.2 s apart.
inline AgentTrack chain(std::span<const Pose> measurements, double w_d, double w_m) {
  AgentTrack track;
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    Detection det;
    det.t = 0.2 * static_cast<double>(i);
    det.torso = measurements[i];
    append_measurement(track, det, w_d, w_m);
  }
  return track;
}

/// Translation subproblem: (w_d I + w_m L) t = w_d z per axis, L the path
/// Laplacian, solved densely.
inline Eigen::MatrixXd dense_translation_solve(std::span<const Pose> z, double w_d, double w_m) {
  const auto n = static_cast<Eigen::Index>(z.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) * w_d;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a(i, i) += w_m;
    a(i + 1, i + 1) += w_m;
    a(i, i + 1) -= w_m;
    a(i + 1, i) -= w_m;
  }
  Eigen::MatrixXd b(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    b.row(i) = w_d * z[static_cast<std::size_t>(i)].translation.transpose();
  }
  return a.fullPivLu().solve(b);
}

inline double max_relative(const Matrix6& a, const Matrix6& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

/// Central differences through the retraction, h = 1e-6.
template <typename F>
Matrix6 numeric_jacobian(const Pose& x, F residual) {
  constexpr double h = 1e-6;
  Matrix6 j;
  for (int k = 0; k < 6; ++k) {
    Vector6 d = Vector6::Zero();
    d[k] = h;
    j.col(k) = (residual(retract(x, d)) - residual(retract(x, -d))) / (2.0 * h);
  }
  return j;
}

/// Largest relative error of the analytic prior and between Jacobians
/// at a random pose pair.
inline double jacobian_error(std::mt19937& rng) {
  const Pose x = random_pose(rng);
  // keep residual rotations away from pi where the log is not smooth
  const Pose z = retract(
      x, (Vector6() << random_vec(rng, -1.0, 1.0), random_vec(rng, -1.0, 1.0)).finished());
  Matrix6 j;
  prior_residual(x, z, &j);
  double worst = max_relative(j, numeric_jacobian(x, [&](const Pose& p) {
                                return prior_residual(p, z);
                              }));
  Matrix6 ja;
  Matrix6 jb;
  between_residual(x, z, &ja, &jb);
  worst = std::max(worst, max_relative(ja, numeric_jacobian(x, [&](const Pose& p) {
                                         return between_residual(p, z);
                                       })));
  worst = std::max(worst, max_relative(jb, numeric_jacobian(z, [&](const Pose& p) {
                                         return between_residual(x, p);
                                       })));
  return worst;
}

/// Noisy yawing walk with roll/pitch jitter.
inline std::vector<Pose> noisy_walk(std::mt19937& rng, int n, double sigma) {
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Pose> z;
  for (int i = 0; i < n; ++i) {
    z.push_back(Pose::from_yaw(0.3 * i + noise(rng),
                               Vec3(0.2 * i + noise(rng), noise(rng), 1.0 + noise(rng))));
    z.back().rotation = z.back().rotation * so3_exp(Vec3(noise(rng), noise(rng), 0.0));
  }
  return z;
}

}  // namespace dsg::test
