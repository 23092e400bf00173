#include "dsg/objects.hpp"
#include "dsg/point_index.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace dsg {

Json cad_to_json(const CadModel& cad) {
  Json pts = Json::array();
  for (const auto& p : cad.points) {
    pts.push_back(vec3_to_json(p));
  }
  return Json{{"id", cad.id}, {"class", class_name(cad.cls)}, {"points", std::move(pts)}};
}

CadModel cad_from_json(const Json& j) {
  try {
    CadModel cad;
    cad.id = require(j, "id").get<std::string>();
    const Json& cls = require(j, "class");
    if (cls.is_string()) {
      const auto id = class_from_name(cls.get<std::string>());
      if (!id) {
        throw ParseError("unknown class '" + cls.get<std::string>() + "'");
      }
      cad.cls = *id;
    } else {
      cad.cls = cls.get<ClassId>();
    }
    for (const auto& p : require(j, "points")) {
      cad.points.push_back(vec3_from_json(p));
    }
    if (cad.points.size() < 10) {
      throw ParseError("CAD model '" + cad.id + "' has fewer than 10 points");
    }
    return cad;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed CAD model: ") + e.what());
  }
}

std::vector<CadModel> load_cad_catalog(const std::filesystem::path& dir) {
  std::vector<CadModel> out;
  if (!std::filesystem::is_directory(dir)) {
    throw ParseError("CAD directory not found: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") {
      continue;
    }
    std::ifstream in(entry.path());
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ParseError(entry.path().string() + ": " + e.what());
    }
    out.push_back(cad_from_json(j));
  }
  std::sort(out.begin(), out.end(),
            [](const CadModel& a, const CadModel& b) { return a.id < b.id; });
  return out;
}

void save_cad_model(const std::filesystem::path& path, const CadModel& cad) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << cad_to_json(cad).dump() << '\n';
}

namespace {

std::vector<Vec3> select(std::span<const Vec3> points, const std::vector<std::size_t>& idx) {
  std::vector<Vec3> out;
  out.reserve(idx.size());
  for (const auto i : idx) {
    out.push_back(points[i]);
  }
  return out;
}

// Fraction of cluster points lying within `tol` of the posed model.
double surface_agreement(const CadModel& cad, const Pose& pose, const PointCluster& cluster,
                         double tol) {
  std::vector<Vec3> posed;
  posed.reserve(cad.points.size());
  for (const auto& p : cad.points) {
    posed.push_back(pose.transform(p));
  }
  const PointIndex index(posed, tol);
  std::size_t near = 0;
  for (const auto& p : cluster.points) {
    if (!index.radius(p, tol).empty()) {
      ++near;
    }
  }
  return static_cast<double>(near) / static_cast<double>(cluster.points.size());
}

// Nearest-point refinement: cluster points against the model, pairs
// farther than `max_dist` ignored.
Pose refine_pose(const CadModel& cad, const PointCluster& cluster, Pose pose, double max_dist) {
  constexpr int kMaxIterations = 30;
  const PointIndex index(cad.points, max_dist);
  for (int it = 0; it < kMaxIterations; ++it) {
    const Pose inv = pose.inverse();
    std::vector<Vec3> from;
    std::vector<Vec3> to;
    for (const auto& p : cluster.points) {
      const Vec3 q = inv.transform(p);
      const auto n = index.nearest(q);
      if (n && (cad.points[*n] - q).norm() <= max_dist) {
        from.push_back(cad.points[*n]);
        to.push_back(p);
      }
    }
    if (from.size() < 3) {
      break;
    }
    const Pose next = estimate_rigid(from, to);
    const double step = (next.translation - pose.translation).norm() +
                        next.rotation.angularDistance(pose.rotation);
    pose = next;
    if (step < 1e-6) {
      break;
    }
  }
  return pose;
}

}  // namespace

ShapeFit fit_known_shape(const CadModel& cad, const PointCluster& cluster, double beta,
                         const HarrisConfig& harris) {
  constexpr double kMinAgreement = 0.9;
  ShapeFit fit;
  fit.object = fit_centroid_aabb(cluster);
  if (cad.cls != cluster.cls || cad.points.size() < 5 || cluster.points.size() < 5) {
    return fit;
  }
  const auto model_kp = select(cad.points, harris_keypoints_3d(cad.points, harris));
  const auto scene_kp = select(cluster.points, harris_keypoints_3d(cluster.points, harris));
  if (model_kp.empty() || scene_kp.empty()) {
    return fit;
  }
  const auto corr = match_all(model_kp.size(), scene_kp.size());
  fit.registration = robust_register(corr, model_kp, scene_kp, beta);
  if (fit.registration.converged) {
    fit.registration.pose = refine_pose(cad, cluster, fit.registration.pose, beta);
  }
  if (!fit.registration.converged ||
      surface_agreement(cad, fit.registration.pose, cluster, beta) < kMinAgreement) {
    fit.registration.converged = false;
    return fit;
  }
  fit.known = true;
  fit.object.pose = fit.registration.pose;
  fit.object.known_shape = cad.id;
  Aabb hull;
  for (const auto& p : cad.points) {
    hull.extend(p);
  }
  Aabb box;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner((c & 1) != 0 ? hull.max.x() : hull.min.x(),
                      (c & 2) != 0 ? hull.max.y() : hull.min.y(),
                      (c & 4) != 0 ? hull.max.z() : hull.min.z());
    box.extend(fit.registration.pose.transform(corner));
  }
  fit.object.aabb = box;
  return fit;
}

}  // namespace dsg
