#pragma once

#include "dsg/agent_track.hpp"
#include "dsg/pose_graph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dsg {

inline constexpr std::size_t kNumJoints = 23;

struct BoundingBox2d {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  [[nodiscard]] double width() const { return x1 - x0; }
  [[nodiscard]] double height() const { return y1 - y0; }
};

struct Detection {
  double t = 0.0;
  AgentClass cls = AgentClass::kHuman;
  Pose torso;
  std::vector<Vec3> joints;
  BoundingBox2d bbox;
  int image_width = 640;
  int image_height = 480;
};

struct GateConfig {
  double max_joint_disp = 3.0;  // meters per `interval`
  double interval = 1.0;        // seconds
  double min_dt = 0.05;         // floor on the elapsed time used by the gate
  double min_bbox = 30.0;       // pixels
  double border_margin = 1.0;   // pixels
};

enum class FilterVerdict { kAccept, kTooSmall, kAtBorder };

[[nodiscard]] std::string_view verdict_name(FilterVerdict v);

/// Rejects detections whose box is too small or touches the image border.
[[nodiscard]] FilterVerdict filter_detection(const Detection& det, const GateConfig& cfg);

/// Largest and mean joint displacement between a detection and the last
/// skeleton of a track; nullopt when the skeletons are not comparable.
struct JointDisplacement {
  double max = 0.0;
  double mean = 0.0;
};
[[nodiscard]] std::optional<JointDisplacement> joint_displacement(const Detection& det,
                                                                  const AgentTrack& track);

/// Whether `track` can absorb `det` under the joint-motion bound.
[[nodiscard]] bool gate_accepts(const Detection& det, const AgentTrack& track,
                                const GateConfig& cfg);

/// Id of the gated track with the smallest mean joint displacement (ties to
/// the lowest id), or nullopt when a new track must be started.
[[nodiscard]] std::optional<std::uint64_t> associate(const Detection& det,
                                                     std::span<const AgentTrack> tracks,
                                                     const GateConfig& cfg);

/// Appends a state at det.t with a prior (weight w_d) and, when the track
/// is not empty, a zero-velocity factor (weight w_m) to the previous state.
/// Throws std::invalid_argument if det.t is not after the last state.
void append_measurement(AgentTrack& track, const Detection& det, double w_d, double w_m);

/// Mean torso position error against a timestamped trajectory, linearly
/// interpolated; states outside the trajectory span are skipped. Throws
/// std::invalid_argument when no state overlaps.
[[nodiscard]] double track_error(std::span<const TrackState> states,
                                 std::span<const TrackState> ground_truth);
[[nodiscard]] double track_error(const AgentTrack& track, std::span<const TrackState> ground_truth);

struct TrackerConfig {
  GateConfig gate;
  double prior_weight = 1.0;   // w_d
  double motion_weight = 4.0;  // w_m
  double max_gap = 1.0;        // seconds without a detection before a track retires (<= 0: never)
  OptimizerOptions optimizer;
};

/// Frame-by-frame multi-agent tracker: filter, associate, append. Retired
/// tracks are kept but no longer take detections.
class MultiAgentTracker {
 public:
  explicit MultiAgentTracker(TrackerConfig config = {}) : config_(config) {}

  struct FrameResult {
    std::vector<FilterVerdict> verdicts;           // one per input detection
    std::vector<std::optional<std::uint64_t>> track_of;  // track id, if used
  };

  /// Processes all detections sharing one timestamp. Several detections
  /// competing for a track are assigned greedily by mean displacement; the
  /// losers start new tracks.
  FrameResult process_frame(std::span<const Detection> detections);

  /// Runs optimize_track on every track and replaces states by the result.
  void optimize_all();

  [[nodiscard]] const std::vector<AgentTrack>& tracks() const { return tracks_; }
  [[nodiscard]] const TrackerConfig& config() const { return config_; }

 private:
  TrackerConfig config_;
  std::vector<AgentTrack> tracks_;
  std::uint64_t next_id_ = 1;
};

/// Builds a robot track directly from timestamped poses (one prior each).
[[nodiscard]] AgentTrack track_from_trajectory(std::uint64_t id, AgentClass cls,
                                               std::span<const TrackState> poses,
                                               double prior_weight = 1.0);

}  // namespace dsg
