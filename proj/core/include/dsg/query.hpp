#pragma once

#include "dsg/scene_graph.hpp"

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace dsg {

/// Box hierarchy following the graph's own containment: building, rooms,
/// places carrying objects, objects. Structures and objects without a room
/// hang directly off the root.
class Bvh {
 public:
  struct Node {
    Aabb box;
    NodeId ref;  // graph node this box stands for (may be invalid for the root)
    std::vector<std::uint32_t> children;
    bool leaf = false;
  };

  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
  [[nodiscard]] std::size_t root() const { return 0; }
  [[nodiscard]] std::vector<NodeId> leaves() const;

  /// Leaves whose box intersects the query (closed bounds), sorted by id.
  [[nodiscard]] std::vector<NodeId> query(const Aabb& box) const;
  [[nodiscard]] std::vector<NodeId> query(const Vec3& a, const Vec3& b) const;

 private:
  friend Bvh build_bvh(const SceneGraph& graph);
  std::vector<Node> nodes_;
};

/// Internal boxes are the union of their children grown by kBoxSlack.
[[nodiscard]] Bvh build_bvh(const SceneGraph& graph);

/// Brute-force reference: every object/structure whose box intersects.
[[nodiscard]] std::vector<NodeId> collision_scan(const SceneGraph& graph, const Aabb& box);
[[nodiscard]] std::vector<NodeId> collision_scan(const SceneGraph& graph, const Vec3& a,
                                                 const Vec3& b);

class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathResult {
  std::vector<NodeId> places;
  double length = 0.0;
};

/// Shortest place-to-place walk over traversable edges (Euclidean weights).
/// nullopt when disconnected; QueryError for ids that are not places.
[[nodiscard]] std::optional<PathResult> plan_path(const SceneGraph& graph, NodeId from, NodeId to);

struct ObjectPath {
  NodeId object;
  PathResult path;
};

/// Nearest-by-path object among the given id or every object of a class.
/// QueryError when no candidate is reachable.
[[nodiscard]] ObjectPath plan_to_object(const SceneGraph& graph,
                                        const std::variant<NodeId, ClassId>& target,
                                        NodeId from);

struct AgentSample {
  Pose pose;
  std::optional<NodeId> place;
  std::optional<NodeId> room;
};

/// Interpolated (lerp + slerp) smoothed pose at t, the nearest place and its
/// room. States are returned unchanged at their own timestamps.
[[nodiscard]] AgentSample agent_at_time(const SceneGraph& graph, NodeId agent, double t);

/// Nearest place to a point (ties to the lowest id).
[[nodiscard]] std::optional<NodeId> nearest_place(const SceneGraph& graph, const Vec3& p);

/// Removes a layer 2-4 node and everything it contains below it. Returns the
/// removed node ids (mesh vertices excluded).
std::vector<NodeId> prune_branch(SceneGraph& graph, NodeId node);

}  // namespace dsg
