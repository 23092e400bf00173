#pragma once

#include "dsg/json_util.hpp"
#include "dsg/scene_graph.hpp"
#include "dsg/tracking.hpp"
#include "dsg/world.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dsg {

struct RoomScore {
  double precision = 0.0;  // macro over predicted rooms
  double recall = 0.0;     // macro over ground-truth rooms holding places
  std::size_t predicted_rooms = 0;
  std::size_t truth_rooms = 0;
  std::size_t places = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> matches;  // (predicted, truth)
};

/// Predicted and true room per place (0 = none). Predicted rooms are
/// matched one-to-one to true rooms greedily by overlap. Places without a
/// true room are ignored; unlabeled places count against recall. Throws
/// std::invalid_argument when no place is labeled.
[[nodiscard]] RoomScore room_metrics(std::span<const std::uint32_t> predicted,
                                     std::span<const std::uint32_t> truth);

/// Ground truth by point location in the world's room tiling (label = room
/// index + 1).
[[nodiscard]] RoomScore room_metrics(std::span<const Vec3> positions,
                                     std::span<const std::uint32_t> predicted,
                                     const WorldSpec& world);

/// Labeled places assigned to the wrong room and how many of them lie within
/// `radius` of a door opening (horizontal distance to the door segment).
/// Unlabeled places are not counted.
[[nodiscard]] std::pair<std::size_t, std::size_t> errors_near_doors(
    std::span<const Vec3> positions, std::span<const std::uint32_t> predicted,
    const WorldSpec& world, const RoomScore& score, double radius = 0.5);

/// Mean torso errors per agent. Every error is taken against the agent that
/// produced the detection, so identity switches between tracks do not count.
struct TrackingErrors {
  std::uint64_t agent = 0;
  double raw = 0.0;       // every detection of the agent
  double filtered = 0.0;  // detections passing the box filter
  double smoothed = 0.0;  // optimized states of confirmed tracks
  std::size_t detections = 0;
  std::size_t outliers = 0;
  std::size_t tracked = 0;             // states behind `smoothed`
  std::optional<std::uint64_t> track;  // track holding most of the agent's detections
};

struct TrackingRun {
  std::vector<TrackingErrors> agents;
  std::vector<AgentTrack> tracks;  // optimized
};

/// Runs the tracker over the detection stream (frames grouped by time) and
/// scores the three ablation inputs per agent against ground truth. Tracks
/// shorter than `min_track_states` are not confirmed and do not count.
[[nodiscard]] TrackingRun tracking_ablation(const WorldSpec& world,
                                            std::span<const SimulatedDetection> detections,
                                            const TrackerConfig& cfg = {},
                                            std::size_t min_track_states = 5);

/// Centroid of the full object surface in world coordinates.
[[nodiscard]] Vec3 object_centroid(const ObjectSpec& object, const WorldSpec& world);
/// Estimated centroid: registered CAD centroid for known shapes, else the
/// node position.
[[nodiscard]] Vec3 object_centroid(const ObjectAttr& object, const WorldSpec& world);

struct ObjectError {
  NodeId node;
  std::uint32_t truth = 0;  // matched world object id
  ClassId cls = classes::kUnknown;
  bool known = false;
  double error = 0.0;
};

/// Each object node against the nearest ground-truth object of its class.
[[nodiscard]] std::vector<ObjectError> object_errors(const SceneGraph& graph,
                                                     const WorldSpec& world);

}  // namespace dsg
