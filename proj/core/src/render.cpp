#include "dsg/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dsg {

namespace {

constexpr double kNoHit = std::numeric_limits<double>::infinity();

bool axis_aligned(const Pose& p) { return p.rotation.vec().isZero(0.0); }

double box_entry(const Solid& s, const Vec3& origin, const Vec3& dir, double max_range) {
  double t = 0.0;
  if (axis_aligned(s.pose)) {
    t = s.box.ray_entry(origin - s.pose.translation, dir, 0.0, max_range);
  } else {
    const Pose inv = s.pose.inverse();
    t = s.box.ray_entry(inv.transform(origin), inv.rotation * dir, 0.0, max_range);
  }
  return t > 0.0 ? t : kNoHit;
}

double sphere_entry(const Vec3& c, double r, const Vec3& origin, const Vec3& dir) {
  const Vec3 oc = origin - c;
  const double b = oc.dot(dir);
  const double h = b * b - (oc.squaredNorm() - r * r);
  if (h < 0.0) {
    return kNoHit;
  }
  const double t = -b - std::sqrt(h);
  return t > 0.0 ? t : kNoHit;
}

double capsule_entry(const Capsule& c, const Vec3& origin, const Vec3& dir) {
  // a capsule is the union of a finite cylinder and two spheres
  double best = std::min(sphere_entry(c.a, c.radius, origin, dir),
                         sphere_entry(c.b, c.radius, origin, dir));
  const Vec3 ba = c.b - c.a;
  const Vec3 oa = origin - c.a;
  const double baba = ba.dot(ba);
  const double bard = ba.dot(dir);
  const double baoa = ba.dot(oa);
  const double rdoa = dir.dot(oa);
  const double oaoa = oa.dot(oa);
  const double a = baba - bard * bard;
  if (a > 1e-12) {
    const double b = baba * rdoa - baoa * bard;
    const double cc = baba * oaoa - baoa * baoa - c.radius * c.radius * baba;
    const double h = b * b - a * cc;
    if (h >= 0.0) {
      const double t = (-b - std::sqrt(h)) / a;
      const double y = baoa + t * bard;
      if (t > 0.0 && y > 0.0 && y < baba) {
        best = std::min(best, t);
      }
    }
  }
  return best;
}

}  // namespace

std::optional<RayHit> cast_ray(std::span<const Solid> solids, std::span<const Capsule> agents,
                               const Vec3& origin, const Vec3& dir, double max_range) {
  double best = kNoHit;
  RayHit hit;
  for (const auto& s : solids) {
    const double t = box_entry(s, origin, dir, max_range);
    if (t < best) {
      best = t;
      hit.cls = s.cls;
      hit.agent = false;
    }
  }
  for (const auto& c : agents) {
    const double t = capsule_entry(c, origin, dir);
    if (t < best) {
      best = t;
      hit.cls = classes::kHuman;
      hit.agent = true;
    }
  }
  if (!(best <= max_range)) {
    return std::nullopt;
  }
  hit.range = best;
  return hit;
}

Scan render_scan(const WorldSpec& world, std::span<const Solid> solids, const TrackState& sensor,
                 const SensorConfig& cfg, std::uint64_t frame) {
  std::mt19937_64 rng(world.seed * 0x9E3779B97F4A7C15ULL + frame + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Capsule> capsules;
  for (const auto& a : world.agents) {
    capsules.push_back(agent_capsule(agent_pose(a, sensor.t)));
  }
  Scan scan;
  scan.t = sensor.t;
  scan.sensor_pose = sensor.pose;
  const Mat3 rot = sensor.pose.rotation_matrix();
  const Vec3& origin = sensor.pose.translation;
  scan.rays.reserve(static_cast<std::size_t>(cfg.azimuth_bins) * cfg.elevation_bins);
  for (int j = 0; j < cfg.elevation_bins; ++j) {
    for (int i = 0; i < cfg.azimuth_bins; ++i) {
      const double u = cfg.jitter ? unit(rng) : 0.5;
      const double v = cfg.jitter ? unit(rng) : 0.5;
      const double az = (i + u) * 2.0 * std::numbers::pi / cfg.azimuth_bins;
      const double el = -0.5 * std::numbers::pi + (j + v) * std::numbers::pi / cfg.elevation_bins;
      const Vec3 local(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      const auto hit = cast_ray(solids, capsules, origin, rot * local, cfg.max_range);
      if (!hit) {
        continue;
      }
      Ray ray;
      ray.direction = local;
      ray.range = hit->range;
      ray.label = hit->cls;
      ray.dynamic_mask = hit->agent;
      if (cfg.depth_sigma > 0.0) {
        ray.range = std::max(1e-3, ray.range + cfg.depth_sigma * noise(rng));
      }
      if (cfg.label_flip > 0.0 && unit(rng) < cfg.label_flip) {
        ray.label = static_cast<ClassId>(
            std::uniform_int_distribution<int>(1, kNumVoxelClasses - 1)(rng));
      }
      scan.rays.push_back(ray);
    }
  }
  return scan;
}

std::vector<Scan> render_scans(const WorldSpec& world, const SensorConfig& cfg) {
  const auto solids = world_solids(world);
  std::vector<Scan> scans;
  scans.reserve(world.robot.size());
  for (std::size_t k = 0; k < world.robot.size(); ++k) {
    scans.push_back(render_scan(world, solids, world.robot[k], cfg, k));
  }
  return scans;
}

std::vector<Vec3> sample_world_surface(const WorldSpec& world, double spacing) {
  const auto solids = world_solids(world);
  std::vector<Aabb> world_boxes;
  std::vector<Pose> inverse;
  for (const auto& s : solids) {
    Aabb box;
    for (int c = 0; c < 8; ++c) {
      box.extend(s.pose.transform({(c & 1) != 0 ? s.box.max.x() : s.box.min.x(),
                                   (c & 2) != 0 ? s.box.max.y() : s.box.min.y(),
                                   (c & 4) != 0 ? s.box.max.z() : s.box.min.z()}));
    }
    world_boxes.push_back(box);
    inverse.push_back(s.pose.inverse());
  }
  const Rect& e = world.extent;
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < solids.size(); ++i) {
    const Aabb& b = solids[i].box;
    for (int axis = 0; axis < 3; ++axis) {
      const int u = (axis + 1) % 3;
      const int v = (axis + 2) % 3;
      const int nu = std::max(1, static_cast<int>(std::ceil(b.extent()[u] / spacing)));
      const int nv = std::max(1, static_cast<int>(std::ceil(b.extent()[v] / spacing)));
      for (const double face : {b.min[axis], b.max[axis]}) {
        for (int iu = 0; iu <= nu; ++iu) {
          for (int iv = 0; iv <= nv; ++iv) {
            Vec3 local;
            local[axis] = face;
            local[u] = b.min[u] + b.extent()[u] * iu / nu;
            local[v] = b.min[v] + b.extent()[v] * iv / nv;
            const Vec3 p = solids[i].pose.transform(local);
            if (p.x() < e.x0 - 1e-6 || p.x() > e.x1 + 1e-6 || p.y() < e.y0 - 1e-6 ||
                p.y() > e.y1 + 1e-6 || p.z() < -1e-6 || p.z() > world.ceiling_z + 1e-6) {
              continue;
            }
            bool hidden = false;
            for (std::size_t j = 0; j < solids.size() && !hidden; ++j) {
              if (j == i || !world_boxes[j].contains(p, 1e-9)) {
                continue;
              }
              hidden = solids[j].box.contains(inverse[j].transform(p), 1e-9);
            }
            if (!hidden) {
              out.push_back(p);
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace dsg
