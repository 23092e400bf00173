#include "dsg/objects.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace dsg {

std::vector<Correspondence> match_all(std::size_t model_count, std::size_t scene_count) {
  std::vector<Correspondence> out;
  out.reserve(model_count * scene_count);
  for (std::size_t m = 0; m < model_count; ++m) {
    for (std::size_t s = 0; s < scene_count; ++s) {
      out.push_back({m, s});
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> compatibility_graph(std::span<const Correspondence> corr,
                                                            std::span<const Vec3> model,
                                                            std::span<const Vec3> scene,
                                                            double beta) {
  for (const auto& c : corr) {
    if (c.model >= model.size() || c.scene >= scene.size()) {
      throw std::out_of_range("correspondence index out of range");
    }
  }
  std::vector<std::vector<std::uint32_t>> adj(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i) {
    for (std::size_t j = i + 1; j < corr.size(); ++j) {
      const double dm = (model[corr[i].model] - model[corr[j].model]).norm();
      const double ds = (scene[corr[i].scene] - scene[corr[j].scene]).norm();
      if (std::abs(dm - ds) <= 2.0 * beta) {
        adj[i].push_back(static_cast<std::uint32_t>(j));
        adj[j].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
  }
  return adj;
}

namespace {

using Mask = std::uint64_t;

void bron_kerbosch(const std::vector<Mask>& nbr, Mask r, Mask p, Mask x, Mask& best) {
  if (p == 0 && x == 0) {
    const int size = std::popcount(r);
    const int best_size = std::popcount(best);
    // among equal sizes keep the clique whose lowest differing vertex is smaller
    if (size > best_size ||
        (size == best_size && best != 0 && std::countr_zero(r ^ best) == std::countr_zero(r))) {
      best = r;
    }
    return;
  }
  if (std::popcount(r) + std::popcount(p) < std::popcount(best)) {
    return;
  }
  Mask px = p | x;
  int pivot = std::countr_zero(px);
  int pivot_degree = -1;
  while (px != 0) {
    const int u = std::countr_zero(px);
    px &= px - 1;
    const int d = std::popcount(p & nbr[static_cast<std::size_t>(u)]);
    if (d > pivot_degree) {
      pivot_degree = d;
      pivot = u;
    }
  }
  Mask candidates = p & ~nbr[static_cast<std::size_t>(pivot)];
  while (candidates != 0) {
    const int v = std::countr_zero(candidates);
    candidates &= candidates - 1;
    const Mask bit = Mask{1} << v;
    bron_kerbosch(nbr, r | bit, p & nbr[static_cast<std::size_t>(v)],
                  x & nbr[static_cast<std::size_t>(v)], best);
    p &= ~bit;
    x |= bit;
  }
}

// Greedy clique growth from the highest-degree vertices. With `all` set,
// every start contributes its clique (for verification by the caller);
// otherwise starts that cannot beat the best clique are pruned.
std::vector<std::vector<std::uint32_t>> greedy_cliques(
    const std::vector<std::vector<std::uint32_t>>& adj, bool all) {
  const std::size_t n = adj.size();
  std::vector<std::uint8_t> dense(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto j : adj[i]) {
      dense[i * n + j] = 1;
    }
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return adj[a].size() > adj[b].size();
  });
  constexpr std::size_t kMaxStarts = 256;
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> best;
  std::vector<std::uint32_t> cand;
  std::vector<std::uint32_t> next;
  for (std::size_t s = 0; s < std::min(n, kMaxStarts); ++s) {
    const std::uint32_t start = order[s];
    if (!all && adj[start].size() + 1 <= best.size()) {
      break;
    }
    std::vector<std::uint32_t> clique{start};
    cand = adj[start];
    while (!cand.empty()) {
      if (!all && clique.size() + cand.size() <= best.size()) {
        break;
      }
      std::uint32_t pick = cand.front();
      std::size_t pick_degree = 0;
      bool first = true;
      for (const auto v : cand) {
        std::size_t d = 0;
        for (const auto w : cand) {
          d += dense[static_cast<std::size_t>(v) * n + w];
        }
        if (first || d > pick_degree) {
          pick = v;
          pick_degree = d;
          first = false;
        }
      }
      clique.push_back(pick);
      next.clear();
      for (const auto w : cand) {
        if (dense[static_cast<std::size_t>(pick) * n + w] != 0) {
          next.push_back(w);
        }
      }
      cand.swap(next);
    }
    if (clique.size() > best.size()) {
      best = clique;
    }
    if (all) {
      std::sort(clique.begin(), clique.end());
      out.push_back(std::move(clique));
    }
  }
  if (!all) {
    std::sort(best.begin(), best.end());
    out.push_back(std::move(best));
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> max_clique(const std::vector<std::vector<std::uint32_t>>& adjacency,
                                      std::size_t exact_limit) {
  const std::size_t n = adjacency.size();
  if (n == 0) {
    return {};
  }
  if (n > exact_limit || n > 64) {
    return greedy_cliques(adjacency, false).front();
  }
  std::vector<Mask> nbr(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto j : adjacency[i]) {
      nbr[i] |= Mask{1} << j;
    }
  }
  const Mask all = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
  Mask best = 0;
  bron_kerbosch(nbr, 0, all, 0, best);
  std::vector<std::uint32_t> out;
  for (Mask m = best; m != 0; m &= m - 1) {
    out.push_back(static_cast<std::uint32_t>(std::countr_zero(m)));
  }
  return out;
}

Pose estimate_rigid(std::span<const Vec3> from, std::span<const Vec3> to) {
  if (from.size() != to.size() || from.empty()) {
    throw std::invalid_argument("rigid estimation needs matched, non-empty point sets");
  }
  Vec3 cf = Vec3::Zero();
  Vec3 ct = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    cf += from[i];
    ct += to[i];
  }
  cf /= static_cast<double>(from.size());
  ct /= static_cast<double>(to.size());
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    h += (from[i] - cf) * (to[i] - ct).transpose();
  }
  const Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
  return {Quat(r), ct - r * cf};
}

namespace {

Pose fit_subset(std::span<const Correspondence> corr, std::span<const Vec3> model,
                std::span<const Vec3> scene, const std::vector<std::size_t>& subset) {
  std::vector<Vec3> from;
  std::vector<Vec3> to;
  for (const auto i : subset) {
    from.push_back(model[corr[i].model]);
    to.push_back(scene[corr[i].scene]);
  }
  return estimate_rigid(from, to);
}

std::vector<std::size_t> inliers_of(const Pose& pose, std::span<const Correspondence> corr,
                                    std::span<const Vec3> model, std::span<const Vec3> scene,
                                    double beta) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < corr.size(); ++i) {
    if ((pose.transform(model[corr[i].model]) - scene[corr[i].scene]).norm() <= beta) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

Registration robust_register(std::span<const Correspondence> corr, std::span<const Vec3> model,
                             std::span<const Vec3> scene, double beta) {
  Registration reg;
  if (corr.size() < 3) {
    return reg;
  }
  const auto adj = compatibility_graph(corr, model, scene, beta);
  // Pairwise consistency cannot tell a rotation from a reflection, so the
  // maximum clique is checked against greedy alternatives by the rigid
  // inliers of the pose each one implies.
  auto candidates = greedy_cliques(adj, true);
  candidates.insert(candidates.begin(), max_clique(adj));
  for (const auto& clique : candidates) {
    if (clique.size() < 3) {
      continue;
    }
    const std::vector<std::size_t> seed(clique.begin(), clique.end());
    Pose pose = fit_subset(corr, model, scene, seed);
    auto inliers = inliers_of(pose, corr, model, scene, beta);
    if (inliers.size() >= 3) {
      const Pose refined = fit_subset(corr, model, scene, inliers);
      auto refined_inliers = inliers_of(refined, corr, model, scene, beta);
      if (refined_inliers.size() >= inliers.size()) {
        pose = refined;
        inliers = std::move(refined_inliers);
      }
    }
    if (inliers.size() > reg.inliers.size()) {
      reg.pose = pose;
      reg.inliers = std::move(inliers);
    }
  }
  reg.converged = reg.inliers.size() >= 3;
  return reg;
}

}  // namespace dsg
