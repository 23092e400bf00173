#pragma once

#include "dsg/agent_track.hpp"
#include "dsg/json_util.hpp"
#include "dsg/objects.hpp"
#include "dsg/semantics.hpp"
#include "dsg/tracking.hpp"
#include "dsg/tsdf.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace dsg {

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  [[nodiscard]] double width() const { return x1 - x0; }
  [[nodiscard]] double depth() const { return y1 - y0; }
  [[nodiscard]] double area() const { return width() * depth(); }
  [[nodiscard]] Vec3 center(double z = 0.0) const {
    return {0.5 * (x0 + x1), 0.5 * (y0 + y1), z};
  }
  /// Half-open containment, so a tiling assigns every point once.
  [[nodiscard]] bool contains(double x, double y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  bool operator==(const Rect&) const = default;
};

struct RoomSpec {
  std::uint32_t id = 0;
  Rect rect;  // wall center lines
};

/// Opening in the wall shared by two rooms. `axis` is the wall's normal
/// axis (0: wall at x = const, 1: wall at y = const).
struct DoorSpec {
  std::uint32_t room_a = 0;
  std::uint32_t room_b = 0;
  int axis = 0;
  double wall = 0.0;    // wall center coordinate along `axis`
  double center = 0.0;  // door center along the wall
  double width = 1.0;
  double height = 2.0;
};

struct ObjectSpec {
  std::uint32_t id = 0;
  ClassId cls = classes::kUnknown;
  Pose pose;                           // yaw-only rotation; box center or CAD origin
  Vec3 extents = Vec3::Zero();         // full box size (box objects)
  std::optional<std::string> cad_id;   // CAD objects are unions of boxes
  std::uint32_t room = 0;
};

struct AgentSpec {
  std::uint64_t id = 0;
  AgentClass cls = AgentClass::kHuman;
  std::vector<TrackState> trajectory;  // torso poses
};

struct CadShape {
  CadModel model;  // sampled surface points, model frame
  std::vector<Aabb> parts;
};

struct WorldSpec {
  std::uint64_t seed = 0;
  Rect extent;
  double ceiling_z = 3.0;
  double wall_thickness = 0.2;
  double slab_thickness = 0.2;
  std::vector<RoomSpec> rooms;
  std::vector<DoorSpec> doors;
  std::vector<ObjectSpec> objects;
  std::vector<AgentSpec> agents;
  std::vector<TrackState> robot;  // sensor poses
  std::vector<CadShape> cad;
  double duration = 60.0;
  double rate = 5.0;

  [[nodiscard]] const CadShape* find_cad(const std::string& id) const;
  /// Room containing (x, y), by the tiling of wall center lines.
  [[nodiscard]] std::optional<std::uint32_t> room_at(double x, double y) const;
  /// World bounds including slabs and outer wall halves.
  [[nodiscard]] Aabb bounds() const;
};

struct WorldConfig {
  std::size_t rooms = 6;
  double extent_x = 20.0;
  double extent_y = 20.0;
  std::size_t agents = 3;
  double duration = 60.0;
  double rate = 5.0;
  double min_room_side = 2.5;
  double split_quantum = 0.5;
  double door_width = 1.0;
  double door_height = 2.0;
  double ceiling_z = 3.0;
  double robot_speed = 1.0;  // raised when the tour would not fit the duration
  double agent_speed_min = 0.3;
  double agent_speed_max = 0.6;
  double sensor_height = 1.2;
  std::size_t max_objects_per_room = 3;
  double cad_probability = 0.5;  // chance that a chair is the CAD chair
};

/// Deterministic in (seed, config). Throws std::invalid_argument when the
/// extent cannot hold the requested rooms.
[[nodiscard]] WorldSpec generate_world(std::uint64_t seed, const WorldConfig& cfg = {});

/// Union-of-boxes chair used as the known shape, with sampled surface points.
[[nodiscard]] CadShape make_cad_chair(double sample_spacing = 0.025);

// --- solid geometry ----------------------------------------------------------

struct Solid {
  Aabb box;          // in the solid's frame
  Pose pose;         // solid frame -> world (identity for axis-aligned parts)
  ClassId cls = classes::kUnknown;
  std::int64_t entity = -1;  // object id for object parts, -1 otherwise
};

/// Static world as oriented boxes: slabs, wall pieces, lintels, objects.
[[nodiscard]] std::vector<Solid> world_solids(const WorldSpec& world);

/// Torso pose of an agent at time t (linear / slerp interpolation, clamped
/// to the trajectory span).
[[nodiscard]] Pose agent_pose(const AgentSpec& agent, double t);

/// Capsule approximating a standing person.
struct Capsule {
  Vec3 a;
  Vec3 b;
  double radius = 0.25;
};
[[nodiscard]] Capsule agent_capsule(const Pose& torso);

/// Body-frame skeleton rotated and placed at the torso pose.
[[nodiscard]] Skeleton agent_skeleton(const Pose& torso);

// --- rendering -----------------------------------------------------------------

struct SensorConfig {
  int azimuth_bins = 180;
  int elevation_bins = 90;
  double max_range = 12.0;
  double depth_sigma = 0.0;
  double label_flip = 0.0;
  bool jitter = true;
};

struct RayHit {
  double range = 0.0;
  ClassId cls = classes::kUnknown;
  bool agent = false;
};

/// Nearest hit of a world ray against boxes and capsules; nullopt if none
/// within max_range.
[[nodiscard]] std::optional<RayHit> cast_ray(std::span<const Solid> solids,
                                             std::span<const Capsule> agents, const Vec3& origin,
                                             const Vec3& dir, double max_range);

/// One scan per robot pose. Rays carry the hit class; agent hits are masked.
[[nodiscard]] std::vector<Scan> render_scans(const WorldSpec& world, const SensorConfig& cfg = {});
[[nodiscard]] Scan render_scan(const WorldSpec& world, std::span<const Solid> solids,
                               const TrackState& sensor, const SensorConfig& cfg,
                               std::uint64_t frame);

/// Points on the visible boundary of the static world at roughly `spacing`.
[[nodiscard]] std::vector<Vec3> sample_world_surface(const WorldSpec& world, double spacing);

// --- detections ------------------------------------------------------------------

struct NoiseModel {
  double torso_sigma = 0.05;
  double joint_sigma = 0.02;
  double outlier_probability = 0.02;
  double occlusion_boost = 10.0;
  double outlier_radius = 2.5;
  double filterable_fraction = 0.6;  // outliers whose box the filter can catch
};

struct SimulatedDetection {
  Detection detection;
  std::uint64_t agent = 0;
  bool outlier = false;
  bool occluded = false;
};

/// Per agent per robot frame: a noisy detection from the robot's camera,
/// replaced by a gross outlier with probability p (boosted when the line of
/// sight is blocked). Inlier joints scatter around the true skeleton
/// independently of the torso noise.
[[nodiscard]] std::vector<SimulatedDetection> simulate_detections(const WorldSpec& world,
                                                                  const NoiseModel& noise,
                                                                  std::uint64_t seed);

// --- serialization ---------------------------------------------------------------

[[nodiscard]] Json world_to_json(const WorldSpec& world);
[[nodiscard]] WorldSpec world_from_json(const Json& j);
void save_world(const std::filesystem::path& dir, const WorldSpec& world);
[[nodiscard]] WorldSpec load_world(const std::filesystem::path& dir);

}  // namespace dsg
