#pragma once

#include "dsg/geometry.hpp"
#include "dsg/json_util.hpp"
#include "dsg/scene_graph.hpp"
#include "dsg/semantics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dsg {

struct PointCluster {
  std::vector<Vec3> points;
  ClassId cls = classes::kUnknown;
  std::vector<std::uint32_t> vertices;  // source mesh vertex per point, if any
};

/// Connected components of the graph linking points at distance <= threshold.
/// Components list ascending indices and are ordered by their first index.
[[nodiscard]] std::vector<std::vector<std::size_t>> euclidean_components(
    std::span<const Vec3> points, double threshold = 0.1);

[[nodiscard]] std::vector<PointCluster> euclidean_cluster(std::span<const Vec3> points,
                                                          double threshold = 0.1,
                                                          ClassId cls = classes::kUnknown);

/// Object instances from the labeled mesh: per object class, clusters of
/// same-labeled vertices; clusters under `min_points` are dropped as noise.
[[nodiscard]] std::vector<PointCluster> segment_objects(const Mesh& mesh, double threshold = 0.1,
                                                        std::size_t min_points = 20);

/// Unknown shape: centroid position, world-aligned rotation, tight box.
[[nodiscard]] ObjectAttr fit_centroid_aabb(const PointCluster& cluster);

// --- keypoints -------------------------------------------------------------

struct HarrisConfig {
  double radius = 0.15;
  double threshold = 1e-4;
  std::size_t normal_neighbors = 10;
};

/// Unit normals from k-nearest-neighbour plane fits (zero when degenerate).
[[nodiscard]] std::vector<Vec3> estimate_normals(std::span<const Vec3> points,
                                                 std::size_t neighbors, double max_radius);

/// Per-point response: det(C) - k tr(C)^2 + k with C the mean outer product
/// of the normals within `radius`; this is det(C) for unit normals (flat
/// and single-edge neighbourhoods score 0, corners score up to 1/27).
[[nodiscard]] std::vector<double> harris_response(std::span<const Vec3> points,
                                                  const HarrisConfig& cfg = {});

/// Indices of points whose response exceeds the threshold and is the
/// largest within `radius` (ties keep the lowest index).
[[nodiscard]] std::vector<std::size_t> harris_keypoints_3d(std::span<const Vec3> points,
                                                           const HarrisConfig& cfg = {});

// --- registration ----------------------------------------------------------

struct Correspondence {
  std::size_t model = 0;
  std::size_t scene = 0;
  bool operator==(const Correspondence&) const = default;
};

/// Every model keypoint against every scene keypoint, model-major.
[[nodiscard]] std::vector<Correspondence> match_all(std::size_t model_count,
                                                    std::size_t scene_count);

/// Pairwise-consistency graph: i ~ j iff the model and scene distances of
/// the two correspondences agree within 2 beta.
[[nodiscard]] std::vector<std::vector<std::uint32_t>> compatibility_graph(
    std::span<const Correspondence> corr, std::span<const Vec3> model, std::span<const Vec3> scene,
    double beta);

/// Maximum clique (exact, Bron-Kerbosch with pivoting) for graphs of at
/// most `exact_limit` vertices, greedy multi-start otherwise. Result sorted.
[[nodiscard]] std::vector<std::uint32_t> max_clique(
    const std::vector<std::vector<std::uint32_t>>& adjacency, std::size_t exact_limit = 60);

/// Least-squares rigid transform taking `from` onto `to` (Arun / Horn).
[[nodiscard]] Pose estimate_rigid(std::span<const Vec3> from, std::span<const Vec3> to);

struct Registration {
  Pose pose;                          // model -> world
  std::vector<std::size_t> inliers;   // indices into the correspondence list
  bool converged = false;
};

/// Maximum-clique inlier selection over the compatibility graph. The
/// maximum clique and the greedy cliques from up to 256 high-degree starts
/// are each fitted; the pose with the most correspondences within beta wins
/// (ties to the maximum clique). Converged when at least 3 inliers remain.
[[nodiscard]] Registration robust_register(std::span<const Correspondence> corr,
                                           std::span<const Vec3> model,
                                           std::span<const Vec3> scene, double beta);

// --- known shapes ----------------------------------------------------------

struct CadModel {
  std::string id;
  ClassId cls = classes::kUnknown;
  std::vector<Vec3> points;  // model frame, meters
};

[[nodiscard]] Json cad_to_json(const CadModel& cad);
[[nodiscard]] CadModel cad_from_json(const Json& j);
/// Every *.json file in `dir`, sorted by id.
[[nodiscard]] std::vector<CadModel> load_cad_catalog(const std::filesystem::path& dir);
void save_cad_model(const std::filesystem::path& path, const CadModel& cad);

struct ShapeFit {
  ObjectAttr object;
  bool known = false;
  Registration registration;
};

/// Registers the CAD model's keypoints against the cluster's, then refines
/// the pose with nearest-point iterations over the whole cluster. The fit is
/// accepted when at least 90% of the cluster lies within beta of the posed
/// model; the box is then the transformed model hull. Otherwise the
/// unknown-shape fit is returned with known = false.
[[nodiscard]] ShapeFit fit_known_shape(const CadModel& cad, const PointCluster& cluster,
                                       double beta = 0.1, const HarrisConfig& harris = {});

}  // namespace dsg
