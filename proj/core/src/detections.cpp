#include "dsg/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dsg {

namespace {

constexpr int kImageWidth = 640;
constexpr int kImageHeight = 480;

BoundingBox2d good_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(60.0, 140.0);
  std::uniform_real_distribution<double> h(150.0, 300.0);
  const double bw = w(rng);
  const double bh = h(rng);
  std::uniform_real_distribution<double> cx(20.0 + bw / 2, kImageWidth - 20.0 - bw / 2);
  std::uniform_real_distribution<double> cy(20.0 + bh / 2, kImageHeight - 20.0 - bh / 2);
  const double x = cx(rng);
  const double y = cy(rng);
  return {x - bw / 2, y - bh / 2, x + bw / 2, y + bh / 2};
}

/// A box the detection filter rejects: either tiny or cut by the border.
BoundingBox2d bad_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < 0.5) {
    std::uniform_real_distribution<double> s(8.0, 25.0);
    const double bw = s(rng);
    const double bh = s(rng);
    const double x = 50.0 + unit(rng) * (kImageWidth - 100.0);
    const double y = 50.0 + unit(rng) * (kImageHeight - 100.0);
    return {x, y, x + bw, y + bh};
  }
  BoundingBox2d b = good_box(rng);
  if (unit(rng) < 0.5) {
    b.x0 = 0.0;
  } else {
    b.x1 = kImageWidth;
  }
  return b;
}

Vec3 gaussian3(std::mt19937_64& rng, double sigma) {
  if (sigma <= 0.0) {
    return Vec3::Zero();
  }
  std::normal_distribution<double> n(0.0, sigma);
  const double x = n(rng);
  const double y = n(rng);
  return {x, y, n(rng)};
}

Vec3 in_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    const double x = u(rng);
    const double y = u(rng);
    const Vec3 v(x, y, u(rng));
    if (v.squaredNorm() <= 1.0) {
      return radius * v;
    }
  }
}

}  // namespace

std::vector<SimulatedDetection> simulate_detections(const WorldSpec& world,
                                                    const NoiseModel& noise, std::uint64_t seed) {
  const auto solids = world_solids(world);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SimulatedDetection> out;
  for (const auto& frame : world.robot) {
    const Vec3& camera = frame.pose.translation;
    for (const auto& agent : world.agents) {
      const Pose truth = agent_pose(agent, frame.t);
      const Vec3 to_agent = truth.translation - camera;
      const double dist = to_agent.norm();
      bool occluded = false;
      if (dist > 0.35) {
        occluded = cast_ray(solids, {}, camera, to_agent / dist, dist - 0.3).has_value();
      }
      const double p = std::min(
          1.0, noise.outlier_probability * (occluded ? noise.occlusion_boost : 1.0));

      SimulatedDetection sim;
      sim.agent = agent.id;
      sim.occluded = occluded;
      sim.outlier = unit(rng) < p;
      Detection& det = sim.detection;
      det.t = frame.t;
      det.cls = agent.cls;
      det.image_width = kImageWidth;
      det.image_height = kImageHeight;
      Pose measured = truth;
      if (sim.outlier) {
        measured.translation += in_ball(rng, noise.outlier_radius);
        measured = Pose::from_yaw(unit(rng) * 2.0 * std::numbers::pi, measured.translation);
        det.bbox = unit(rng) < noise.filterable_fraction ? bad_box(rng) : good_box(rng);
      } else {
        measured.translation += gaussian3(rng, noise.torso_sigma);
        if (noise.torso_sigma > 0.0) {
          std::normal_distribution<double> yaw(0.0, noise.torso_sigma);
          measured = Pose::from_yaw(truth.yaw() + yaw(rng), measured.translation);
        }
        det.bbox = good_box(rng);
      }
      det.torso = measured;
      det.joints = agent_skeleton(sim.outlier ? measured : truth);
      for (auto& j : det.joints) {
        j += gaussian3(rng, noise.joint_sigma);
      }
      out.push_back(std::move(sim));
    }
  }
  return out;
}

}  // namespace dsg
