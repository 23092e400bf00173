#pragma once

#include "dsg/geometry.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace dsg {

enum class AgentClass : std::uint8_t { kHuman, kRobot };

[[nodiscard]] std::string_view agent_class_name(AgentClass c);

struct TrackState {
  double t = 0.0;
  Pose pose;
};

/// Unary factor pinning the state at `state` to a measured pose.
struct PriorFactor {
  std::size_t state = 0;
  double t = 0.0;
  Pose measurement;
  double weight = 1.0;
};

/// Binary factor penalising pose change between consecutive states.
struct ZeroVelocityFactor {
  std::size_t from = 0;
  std::size_t to = 0;
  double t_from = 0.0;
  double t_to = 0.0;
  double weight = 1.0;
};

using Skeleton = std::vector<Vec3>;

/// Per-agent pose graph. States are kept sorted by strictly increasing t.
struct AgentTrack {
  std::uint64_t id = 0;
  AgentClass cls = AgentClass::kHuman;
  std::vector<TrackState> states;
  std::vector<PriorFactor> priors;
  std::vector<ZeroVelocityFactor> motion;
  std::vector<Skeleton> skeletons;  // one per state, may be empty for robots

  [[nodiscard]] bool empty() const { return states.empty(); }
  [[nodiscard]] double start_time() const { return states.front().t; }
  [[nodiscard]] double end_time() const { return states.back().t; }
  [[nodiscard]] bool timestamps_increasing() const;

  bool operator==(const AgentTrack& rhs) const;
};

}  // namespace dsg
