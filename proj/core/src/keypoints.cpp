#include "dsg/objects.hpp"
#include "dsg/point_index.hpp"

#include <Eigen/Eigenvalues>

namespace dsg {

std::vector<Vec3> estimate_normals(std::span<const Vec3> points, std::size_t neighbors,
                                   double max_radius) {
  const PointIndex index(points, max_radius);
  std::vector<Vec3> normals(points.size(), Vec3::Zero());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto nn = index.knn(points[i], neighbors, max_radius);
    if (nn.size() < 3) {
      continue;
    }
    Vec3 mean = Vec3::Zero();
    for (const auto j : nn) {
      mean += points[j];
    }
    mean /= static_cast<double>(nn.size());
    Mat3 cov = Mat3::Zero();
    for (const auto j : nn) {
      const Vec3 d = points[j] - mean;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    // collinear neighbourhoods have no defined plane
    if (eig.eigenvalues()(1) <= 1e-12 * std::max(1.0, eig.eigenvalues()(2))) {
      continue;
    }
    normals[i] = eig.eigenvectors().col(0).normalized();
  }
  return normals;
}

std::vector<double> harris_response(std::span<const Vec3> points, const HarrisConfig& cfg) {
  constexpr double k = 0.04;
  const auto normals = estimate_normals(points, cfg.normal_neighbors, cfg.radius);
  const PointIndex index(points, cfg.radius);
  std::vector<double> response(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    Mat3 c = Mat3::Zero();
    std::size_t count = 0;
    for (const auto j : index.radius(points[i], cfg.radius)) {
      if (normals[j].isZero()) {
        continue;
      }
      c += normals[j] * normals[j].transpose();
      ++count;
    }
    if (count < 3) {
      continue;
    }
    c /= static_cast<double>(count);
    const double tr = c.trace();
    response[i] = c.determinant() - k * tr * tr + k;
  }
  return response;
}

std::vector<std::size_t> harris_keypoints_3d(std::span<const Vec3> points,
                                             const HarrisConfig& cfg) {
  const auto response = harris_response(points, cfg);
  const PointIndex index(points, cfg.radius);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(response[i] > cfg.threshold)) {
      continue;
    }
    bool is_max = true;
    for (const auto j : index.radius(points[i], cfg.radius)) {
      if (response[j] > response[i] || (response[j] == response[i] && j < i)) {
        is_max = false;
        break;
      }
    }
    if (is_max) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace dsg
