#pragma once

#include "dsg/agent_track.hpp"
#include "dsg/geometry.hpp"
#include "dsg/semantics.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dsg {

enum class Layer : std::uint8_t {
  kMesh = 1,
  kObjectsAgents = 2,
  kPlacesStructures = 3,
  kRooms = 4,
  kBuilding = 5,
};

[[nodiscard]] std::string_view layer_name(Layer layer);

/// Graph-wide unique node id. The layer tag lives in the top byte so it can
/// never change after creation; mesh vertex ids carry the vertex index in
/// the low bits.
class NodeId {
 public:
  constexpr NodeId() = default;
  constexpr NodeId(Layer layer, std::uint64_t index)
      : value_((static_cast<std::uint64_t>(layer) << kShift) | (index & kIndexMask)) {}

  static constexpr NodeId from_raw(std::uint64_t raw) {
    NodeId id;
    id.value_ = raw;
    return id;
  }

  [[nodiscard]] constexpr std::uint64_t value() const { return value_; }
  [[nodiscard]] constexpr std::uint64_t index() const { return value_ & kIndexMask; }
  [[nodiscard]] constexpr Layer layer() const { return static_cast<Layer>(value_ >> kShift); }
  [[nodiscard]] constexpr bool valid() const { return value_ != 0; }

  constexpr auto operator<=>(const NodeId&) const = default;

 private:
  static constexpr int kShift = 56;
  static constexpr std::uint64_t kIndexMask = (std::uint64_t{1} << kShift) - 1;
  std::uint64_t value_ = 0;
};

struct MeshVertexAttr {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  std::array<std::uint8_t, 3> color{128, 128, 128};
  ClassId label = classes::kUnknown;

  bool operator==(const MeshVertexAttr&) const = default;
};

struct ObjectAttr {
  Pose pose;
  Aabb aabb;
  ClassId cls = classes::kUnknown;
  std::optional<std::string> known_shape;

  bool operator==(const ObjectAttr&) const = default;
};

struct AgentAttr {
  AgentClass cls = AgentClass::kHuman;
  AgentTrack track;

  bool operator==(const AgentAttr&) const = default;
};

struct PlaceAttr {
  Vec3 position = Vec3::Zero();
  double clearance = 0.0;
  std::optional<NodeId> room;

  bool operator==(const PlaceAttr&) const = default;
};

struct StructureAttr {
  Pose pose;
  Aabb aabb;
  ClassId cls = classes::kWall;

  bool operator==(const StructureAttr&) const = default;
};

struct RoomAttr {
  Pose pose;
  Aabb aabb;
  ClassId cls = classes::kRoom;

  bool operator==(const RoomAttr&) const = default;
};

struct BuildingAttr {
  Pose pose;
  Aabb aabb;
  ClassId cls = classes::kBuilding;

  bool operator==(const BuildingAttr&) const = default;
};

using NodeAttributes = std::variant<MeshVertexAttr, ObjectAttr, AgentAttr, PlaceAttr,
                                    StructureAttr, RoomAttr, BuildingAttr>;

/// Layer a given attribute kind belongs to.
[[nodiscard]] Layer layer_of(const NodeAttributes& attrs);

enum class Relation : std::uint8_t {
  kMeshFaceMembership,
  kObjectContainsVertices,
  kTraversable,
  kProximal,
  kPlaceInRoom,
  kRoomAdjacent,
  kRoomInBuilding,
  kAgentAtPlace,
};

[[nodiscard]] std::string_view relation_name(Relation r);
[[nodiscard]] std::optional<Relation> relation_from_name(std::string_view name);

using EdgeId = std::uint64_t;

struct Edge {
  NodeId src;
  NodeId dst;
  Relation relation = Relation::kTraversable;
  std::optional<double> t;  // agent-at-place only

  bool operator==(const Edge&) const = default;
};

struct Node {
  NodeId id;
  NodeAttributes attrs;

  bool operator==(const Node&) const = default;
};

struct Mesh {
  std::vector<MeshVertexAttr> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;

  bool operator==(const Mesh&) const = default;
};

/// Raised when a mutation would break a graph contract.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Containment slack between nested boxes (one 0.05 m voxel).
inline constexpr double kBoxSlack = 0.05;

struct Violation {
  std::string code;
  NodeId node;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::size_t count(std::string_view code) const;
};

/// Layered directed scene graph. Mesh vertices (layer 1) live in an indexed
/// array; everything else is a node keyed by NodeId.
///
/// Mutation requires exclusive access; const member functions do not touch
/// shared mutable state and may run concurrently.
class SceneGraph {
 public:
  NodeId add_node(const NodeAttributes& attrs);
  /// Same as add_node but checks `layer` against the attribute kind.
  NodeId add_node(Layer layer, const NodeAttributes& attrs);
  EdgeId add_edge(NodeId src, NodeId dst, Relation relation,
                  std::optional<double> t = std::nullopt);
  /// Inserts a node with a caller-chosen id (deserialization).
  void insert_node(NodeId id, const NodeAttributes& attrs);
  void add_face(std::uint32_t a, std::uint32_t b, std::uint32_t c);

  void remove_edge(EdgeId id);
  /// Removes a node and every edge touching it.
  void remove_node(NodeId id);
  /// Removes mesh vertices (and faces/edges referencing them), reindexing
  /// the survivors.
  void remove_mesh_vertices(const std::vector<std::uint32_t>& indices);

  [[nodiscard]] bool has_node(NodeId id) const;
  [[nodiscard]] const NodeAttributes& attributes(NodeId id) const;
  NodeAttributes& attributes(NodeId id);
  template <typename T>
  [[nodiscard]] const T& get(NodeId id) const {
    return std::get<T>(attributes(id));
  }
  template <typename T>
  T& get(NodeId id) {
    return std::get<T>(attributes(id));
  }

  [[nodiscard]] const std::map<NodeId, Node>& nodes() const { return nodes_; }
  [[nodiscard]] const std::map<EdgeId, Edge>& edges() const { return edges_; }
  [[nodiscard]] const Mesh& mesh() const { return mesh_; }
  [[nodiscard]] std::size_t num_nodes() const { return nodes_.size(); }
  [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }

  [[nodiscard]] std::vector<NodeId> nodes_in_layer(Layer layer) const;
  template <typename T>
  [[nodiscard]] std::vector<NodeId> nodes_of() const {
    std::vector<NodeId> out;
    for (const auto& [id, node] : nodes_) {
      if (std::holds_alternative<T>(node.attrs)) {
        out.push_back(id);
      }
    }
    return out;
  }

  [[nodiscard]] std::vector<EdgeId> out_edges(NodeId id) const;
  [[nodiscard]] std::vector<EdgeId> in_edges(NodeId id) const;
  /// Targets of out-edges with the given relation.
  [[nodiscard]] std::vector<NodeId> children(NodeId id, Relation relation) const;
  /// Sources of in-edges with the given relation.
  [[nodiscard]] std::vector<NodeId> parents(NodeId id, Relation relation) const;
  /// Neighbours over an undirected relation (both directions).
  [[nodiscard]] std::vector<NodeId> neighbors(NodeId id, Relation relation) const;

  /// Place an object is proximal to, if any.
  [[nodiscard]] std::optional<NodeId> parent_place(NodeId object) const;
  /// Room a place belongs to, if any.
  [[nodiscard]] std::optional<NodeId> room_of_place(NodeId place) const;
  [[nodiscard]] std::optional<NodeId> building() const;

  bool operator==(const SceneGraph& rhs) const;

 private:
  void check_attributes(const NodeAttributes& attrs) const;
  void link(EdgeId id, const Edge& e);

  std::map<NodeId, Node> nodes_;
  std::map<EdgeId, Edge> edges_;
  std::unordered_map<std::uint64_t, std::vector<EdgeId>> out_;
  std::unordered_map<std::uint64_t, std::vector<EdgeId>> in_;
  Mesh mesh_;
  std::uint64_t next_index_ = 1;
  EdgeId next_edge_ = 0;
};

/// Whether `relation` may connect a `src` node to a `dst` node.
[[nodiscard]] bool relation_legal(Relation relation, const NodeAttributes* src,
                                  Layer src_layer, const NodeAttributes* dst, Layer dst_layer);

/// Checks every layer contract and returns all violations found.
[[nodiscard]] ValidationReport validate(const SceneGraph& graph);

/// Recomputes room boxes from their places, proximal objects and agent
/// poses, then the building box from its rooms.
void refresh_room_boxes(SceneGraph& graph);

}  // namespace dsg

template <>
struct std::hash<dsg::NodeId> {
  std::size_t operator()(const dsg::NodeId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value());
  }
};
