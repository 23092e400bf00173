#include "dsg/scene_graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace dsg {

std::string_view agent_class_name(AgentClass c) {
  return c == AgentClass::kRobot ? "robot" : "human";
}

bool AgentTrack::timestamps_increasing() const {
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (!(states[i].t > states[i - 1].t)) {
      return false;
    }
  }
  return true;
}

bool AgentTrack::operator==(const AgentTrack& rhs) const {
  if (id != rhs.id || cls != rhs.cls || states.size() != rhs.states.size() ||
      priors.size() != rhs.priors.size() || motion.size() != rhs.motion.size() ||
      skeletons != rhs.skeletons) {
    return false;
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].t != rhs.states[i].t || !(states[i].pose == rhs.states[i].pose)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < priors.size(); ++i) {
    const auto& a = priors[i];
    const auto& b = rhs.priors[i];
    if (a.state != b.state || a.t != b.t || !(a.measurement == b.measurement) ||
        a.weight != b.weight) {
      return false;
    }
  }
  for (std::size_t i = 0; i < motion.size(); ++i) {
    const auto& a = motion[i];
    const auto& b = rhs.motion[i];
    if (a.from != b.from || a.to != b.to || a.t_from != b.t_from || a.t_to != b.t_to ||
        a.weight != b.weight) {
      return false;
    }
  }
  return true;
}

std::string_view layer_name(Layer layer) {
  switch (layer) {
    case Layer::kMesh: return "mesh";
    case Layer::kObjectsAgents: return "objects_agents";
    case Layer::kPlacesStructures: return "places_structures";
    case Layer::kRooms: return "rooms";
    case Layer::kBuilding: return "building";
  }
  return "unknown";
}

Layer layer_of(const NodeAttributes& attrs) {
  struct Visitor {
    Layer operator()(const MeshVertexAttr&) const { return Layer::kMesh; }
    Layer operator()(const ObjectAttr&) const { return Layer::kObjectsAgents; }
    Layer operator()(const AgentAttr&) const { return Layer::kObjectsAgents; }
    Layer operator()(const PlaceAttr&) const { return Layer::kPlacesStructures; }
    Layer operator()(const StructureAttr&) const { return Layer::kPlacesStructures; }
    Layer operator()(const RoomAttr&) const { return Layer::kRooms; }
    Layer operator()(const BuildingAttr&) const { return Layer::kBuilding; }
  };
  return std::visit(Visitor{}, attrs);
}

namespace {

constexpr std::array<std::pair<Relation, std::string_view>, 8> kRelationNames = {{
    {Relation::kMeshFaceMembership, "mesh-face-membership"},
    {Relation::kObjectContainsVertices, "object-contains-vertices"},
    {Relation::kTraversable, "traversable"},
    {Relation::kProximal, "proximal"},
    {Relation::kPlaceInRoom, "place-in-room"},
    {Relation::kRoomAdjacent, "room-adjacent"},
    {Relation::kRoomInBuilding, "room-in-building"},
    {Relation::kAgentAtPlace, "agent-at-place"},
}};

template <typename T>
bool holds(const NodeAttributes* attrs) {
  return attrs != nullptr && std::holds_alternative<T>(*attrs);
}

std::string id_string(NodeId id) {
  std::ostringstream os;
  os << layer_name(id.layer()) << ":" << id.index();
  return os.str();
}

}  // namespace

std::string_view relation_name(Relation r) {
  for (const auto& [rel, name] : kRelationNames) {
    if (rel == r) {
      return name;
    }
  }
  return "unknown";
}

std::optional<Relation> relation_from_name(std::string_view name) {
  for (const auto& [rel, n] : kRelationNames) {
    if (n == name) {
      return rel;
    }
  }
  return std::nullopt;
}

bool relation_legal(Relation relation, const NodeAttributes* src, Layer src_layer,
                    const NodeAttributes* dst, Layer dst_layer) {
  switch (relation) {
    case Relation::kMeshFaceMembership:
      return src_layer == Layer::kMesh && dst_layer == Layer::kMesh;
    case Relation::kObjectContainsVertices:
      return holds<ObjectAttr>(src) && dst_layer == Layer::kMesh;
    case Relation::kTraversable:
      return holds<PlaceAttr>(src) && holds<PlaceAttr>(dst);
    case Relation::kProximal:
      return holds<ObjectAttr>(src) && holds<PlaceAttr>(dst);
    case Relation::kPlaceInRoom:
      return holds<PlaceAttr>(src) && holds<RoomAttr>(dst);
    case Relation::kRoomAdjacent:
      return holds<RoomAttr>(src) && holds<RoomAttr>(dst);
    case Relation::kRoomInBuilding:
      return holds<RoomAttr>(src) && holds<BuildingAttr>(dst);
    case Relation::kAgentAtPlace:
      return holds<AgentAttr>(src) && holds<PlaceAttr>(dst);
  }
  return false;
}

std::size_t ValidationReport::count(std::string_view code) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; }));
}

void SceneGraph::check_attributes(const NodeAttributes& attrs) const {
  auto check_box = [](const Aabb& box, const char* what) {
    if (!box.valid()) {
      throw GraphError(std::string(what) + " box has min > max");
    }
  };
  if (const auto* v = std::get_if<MeshVertexAttr>(&attrs)) {
    if (std::abs(v->normal.norm() - 1.0) > 1e-6) {
      throw GraphError("mesh vertex normal is not unit length");
    }
    if (!v->position.allFinite()) {
      throw GraphError("mesh vertex position is not finite");
    }
  } else if (const auto* o = std::get_if<ObjectAttr>(&attrs)) {
    check_box(o->aabb, "object");
  } else if (const auto* s = std::get_if<StructureAttr>(&attrs)) {
    check_box(s->aabb, "structure");
  } else if (const auto* a = std::get_if<AgentAttr>(&attrs)) {
    if (!a->track.timestamps_increasing()) {
      throw GraphError("agent pose graph timestamps are not strictly increasing");
    }
  } else if (const auto* p = std::get_if<PlaceAttr>(&attrs)) {
    if (!p->position.allFinite()) {
      throw GraphError("place position is not finite");
    }
  }
}

NodeId SceneGraph::add_node(const NodeAttributes& attrs) {
  check_attributes(attrs);
  if (const auto* v = std::get_if<MeshVertexAttr>(&attrs)) {
    mesh_.vertices.push_back(*v);
    return NodeId(Layer::kMesh, mesh_.vertices.size() - 1);
  }
  const NodeId id(layer_of(attrs), next_index_++);
  nodes_.emplace(id, Node{id, attrs});
  return id;
}

NodeId SceneGraph::add_node(Layer layer, const NodeAttributes& attrs) {
  if (layer_of(attrs) != layer) {
    throw GraphError("attributes do not belong to layer " + std::string(layer_name(layer)));
  }
  return add_node(attrs);
}

void SceneGraph::insert_node(NodeId id, const NodeAttributes& attrs) {
  if (layer_of(attrs) != id.layer() || id.layer() == Layer::kMesh) {
    throw GraphError("node id layer does not match attributes");
  }
  check_attributes(attrs);
  if (!nodes_.emplace(id, Node{id, attrs}).second) {
    throw GraphError("duplicate node id " + id_string(id));
  }
  next_index_ = std::max(next_index_, id.index() + 1);
}

void SceneGraph::add_face(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  const auto n = mesh_.vertices.size();
  if (a >= n || b >= n || c >= n) {
    throw GraphError("face references a missing mesh vertex");
  }
  mesh_.faces.push_back({a, b, c});
}

bool SceneGraph::has_node(NodeId id) const {
  if (id.layer() == Layer::kMesh) {
    return id.index() < mesh_.vertices.size();
  }
  return nodes_.count(id) != 0;
}

const NodeAttributes& SceneGraph::attributes(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw GraphError("unknown node " + id_string(id));
  }
  return it->second.attrs;
}

NodeAttributes& SceneGraph::attributes(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw GraphError("unknown node " + id_string(id));
  }
  return it->second.attrs;
}

void SceneGraph::link(EdgeId id, const Edge& e) {
  out_[e.src.value()].push_back(id);
  in_[e.dst.value()].push_back(id);
}

EdgeId SceneGraph::add_edge(NodeId src, NodeId dst, Relation relation, std::optional<double> t) {
  if (!has_node(src) || !has_node(dst)) {
    throw GraphError("edge endpoint does not exist");
  }
  const NodeAttributes* sa = src.layer() == Layer::kMesh ? nullptr : &attributes(src);
  const NodeAttributes* da = dst.layer() == Layer::kMesh ? nullptr : &attributes(dst);
  if (!relation_legal(relation, sa, src.layer(), da, dst.layer())) {
    throw GraphError("relation " + std::string(relation_name(relation)) + " is illegal between " +
                     id_string(src) + " and " + id_string(dst));
  }
  if (relation == Relation::kAgentAtPlace && !t.has_value()) {
    throw GraphError("agent-at-place edges need a timestamp");
  }
  if (relation != Relation::kAgentAtPlace) {
    t.reset();
  }
  const EdgeId id = next_edge_++;
  Edge e{src, dst, relation, t};
  edges_.emplace(id, e);
  link(id, e);
  if (relation == Relation::kPlaceInRoom) {
    get<PlaceAttr>(src).room = dst;
  }
  return id;
}

void SceneGraph::remove_edge(EdgeId id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) {
    return;
  }
  if (it->second.relation == Relation::kPlaceInRoom && has_node(it->second.src)) {
    auto& place = get<PlaceAttr>(it->second.src);
    if (place.room == it->second.dst) {
      place.room.reset();
    }
  }
  auto drop = [id](std::vector<EdgeId>& v) { std::erase(v, id); };
  drop(out_[it->second.src.value()]);
  drop(in_[it->second.dst.value()]);
  edges_.erase(it);
}

void SceneGraph::remove_node(NodeId id) {
  if (id.layer() == Layer::kMesh) {
    remove_mesh_vertices({static_cast<std::uint32_t>(id.index())});
    return;
  }
  if (nodes_.count(id) == 0) {
    throw GraphError("unknown node " + id_string(id));
  }
  std::vector<EdgeId> touching;
  if (auto it = out_.find(id.value()); it != out_.end()) {
    touching.insert(touching.end(), it->second.begin(), it->second.end());
  }
  if (auto it = in_.find(id.value()); it != in_.end()) {
    touching.insert(touching.end(), it->second.begin(), it->second.end());
  }
  for (EdgeId e : touching) {
    remove_edge(e);
  }
  out_.erase(id.value());
  in_.erase(id.value());
  nodes_.erase(id);
  for (auto& [nid, node] : nodes_) {
    if (auto* p = std::get_if<PlaceAttr>(&node.attrs); p && p->room == id) {
      p->room.reset();
    }
  }
}

void SceneGraph::remove_mesh_vertices(const std::vector<std::uint32_t>& indices) {
  if (indices.empty()) {
    return;
  }
  const std::size_t n = mesh_.vertices.size();
  std::vector<bool> removed(n, false);
  for (auto i : indices) {
    if (i < n) {
      removed[i] = true;
    }
  }
  constexpr auto kGone = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> remap(n, kGone);
  std::vector<MeshVertexAttr> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) {
      remap[i] = static_cast<std::uint32_t>(kept.size());
      kept.push_back(mesh_.vertices[i]);
    }
  }
  mesh_.vertices = std::move(kept);
  std::vector<std::array<std::uint32_t, 3>> faces;
  faces.reserve(mesh_.faces.size());
  for (const auto& f : mesh_.faces) {
    if (remap[f[0]] != kGone && remap[f[1]] != kGone && remap[f[2]] != kGone) {
      faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
    }
  }
  mesh_.faces = std::move(faces);

  auto remap_id = [&](NodeId id) -> std::optional<NodeId> {
    if (id.layer() != Layer::kMesh) {
      return id;
    }
    if (id.index() >= n || remap[id.index()] == kGone) {
      return std::nullopt;
    }
    return NodeId(Layer::kMesh, remap[id.index()]);
  };
  std::map<EdgeId, Edge> edges;
  for (const auto& [eid, e] : edges_) {
    auto s = remap_id(e.src);
    auto d = remap_id(e.dst);
    if (s && d) {
      Edge copy = e;
      copy.src = *s;
      copy.dst = *d;
      edges.emplace(eid, copy);
    }
  }
  edges_ = std::move(edges);
  out_.clear();
  in_.clear();
  for (const auto& [eid, e] : edges_) {
    link(eid, e);
  }
}

std::vector<NodeId> SceneGraph::nodes_in_layer(Layer layer) const {
  std::vector<NodeId> out;
  if (layer == Layer::kMesh) {
    out.reserve(mesh_.vertices.size());
    for (std::size_t i = 0; i < mesh_.vertices.size(); ++i) {
      out.emplace_back(Layer::kMesh, i);
    }
    return out;
  }
  for (const auto& [id, node] : nodes_) {
    if (id.layer() == layer) {
      out.push_back(id);
    }
  }
  return out;
}

std::vector<EdgeId> SceneGraph::out_edges(NodeId id) const {
  auto it = out_.find(id.value());
  return it == out_.end() ? std::vector<EdgeId>{} : it->second;
}

std::vector<EdgeId> SceneGraph::in_edges(NodeId id) const {
  auto it = in_.find(id.value());
  return it == in_.end() ? std::vector<EdgeId>{} : it->second;
}

std::vector<NodeId> SceneGraph::children(NodeId id, Relation relation) const {
  std::vector<NodeId> out;
  if (auto it = out_.find(id.value()); it != out_.end()) {
    for (EdgeId e : it->second) {
      const Edge& edge = edges_.at(e);
      if (edge.relation == relation) {
        out.push_back(edge.dst);
      }
    }
  }
  return out;
}

std::vector<NodeId> SceneGraph::parents(NodeId id, Relation relation) const {
  std::vector<NodeId> out;
  if (auto it = in_.find(id.value()); it != in_.end()) {
    for (EdgeId e : it->second) {
      const Edge& edge = edges_.at(e);
      if (edge.relation == relation) {
        out.push_back(edge.src);
      }
    }
  }
  return out;
}

std::vector<NodeId> SceneGraph::neighbors(NodeId id, Relation relation) const {
  auto out = children(id, relation);
  auto in = parents(id, relation);
  out.insert(out.end(), in.begin(), in.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<NodeId> SceneGraph::parent_place(NodeId object) const {
  auto places = children(object, Relation::kProximal);
  if (places.empty()) {
    return std::nullopt;
  }
  return places.front();
}

std::optional<NodeId> SceneGraph::room_of_place(NodeId place) const {
  auto rooms = children(place, Relation::kPlaceInRoom);
  if (rooms.empty()) {
    return std::nullopt;
  }
  return rooms.front();
}

std::optional<NodeId> SceneGraph::building() const {
  for (const auto& [id, node] : nodes_) {
    if (std::holds_alternative<BuildingAttr>(node.attrs)) {
      return id;
    }
  }
  return std::nullopt;
}

bool SceneGraph::operator==(const SceneGraph& rhs) const {
  if (nodes_ != rhs.nodes_ || mesh_ != rhs.mesh_ || edges_.size() != rhs.edges_.size()) {
    return false;
  }
  // edge ids are storage detail; compare edge multisets in insertion order
  auto a = edges_.begin();
  auto b = rhs.edges_.begin();
  for (; a != edges_.end(); ++a, ++b) {
    if (!(a->second == b->second)) {
      return false;
    }
  }
  return true;
}

namespace {

const Pose* agent_pose_at(const AgentAttr& agent, double t) {
  const auto& states = agent.track.states;
  auto it = std::lower_bound(states.begin(), states.end(), t,
                             [](const TrackState& s, double v) { return s.t < v; });
  if (it != states.end() && it->t == t) {
    return &it->pose;
  }
  return nullptr;
}

}  // namespace

ValidationReport validate(const SceneGraph& graph) {
  ValidationReport report;
  auto add = [&](std::string code, NodeId id, std::string msg) {
    report.violations.push_back({std::move(code), id, std::move(msg)});
  };

  for (const auto& [eid, e] : graph.edges()) {
    if (!graph.has_node(e.src) || !graph.has_node(e.dst)) {
      add("dangling-edge", e.src, "edge " + std::to_string(eid) + " references a missing node");
      continue;
    }
    const NodeAttributes* sa = e.src.layer() == Layer::kMesh ? nullptr : &graph.attributes(e.src);
    const NodeAttributes* da = e.dst.layer() == Layer::kMesh ? nullptr : &graph.attributes(e.dst);
    if (!relation_legal(e.relation, sa, e.src.layer(), da, e.dst.layer())) {
      add("illegal-relation", e.src,
          std::string(relation_name(e.relation)) + " to " + id_string(e.dst));
    }
  }

  for (std::size_t i = 0; i < graph.mesh().vertices.size(); ++i) {
    if (std::abs(graph.mesh().vertices[i].normal.norm() - 1.0) > 1e-6) {
      add("mesh-normal", NodeId(Layer::kMesh, i), "normal not unit length");
    }
  }

  const auto building = graph.building();
  std::size_t building_count = 0;
  for (const auto& [id, node] : graph.nodes()) {
    if (std::holds_alternative<BuildingAttr>(node.attrs)) {
      ++building_count;
    }
  }
  if (building_count > 1) {
    add("multiple-buildings", *building, "more than one building node");
  }

  for (const auto& [id, node] : graph.nodes()) {
    if (const auto* obj = std::get_if<ObjectAttr>(&node.attrs)) {
      if (!obj->aabb.valid()) {
        add("invalid-box", id, "object box has min > max");
      }
      if (!graph.parent_place(id)) {
        add("object-without-place", id, "object has no proximal place");
      }
    } else if (const auto* agent = std::get_if<AgentAttr>(&node.attrs)) {
      if (!agent->track.timestamps_increasing()) {
        add("agent-timestamps", id, "pose graph timestamps not strictly increasing");
      }
    } else if (std::holds_alternative<PlaceAttr>(node.attrs)) {
      if (!graph.room_of_place(id)) {
        add("place-without-room", id, "place has no room");
      }
    } else if (const auto* s = std::get_if<StructureAttr>(&node.attrs)) {
      if (!s->aabb.valid()) {
        add("invalid-box", id, "structure box has min > max");
      }
    } else if (const auto* room = std::get_if<RoomAttr>(&node.attrs)) {
      const auto owners = graph.children(id, Relation::kRoomInBuilding);
      if (owners.empty()) {
        add("room-without-building", id, "room not connected to the building");
      } else {
        const auto& b = graph.get<BuildingAttr>(owners.front());
        if (!b.aabb.contains(room->aabb, kBoxSlack)) {
          add("building-containment", id, "room box exceeds building box");
        }
      }
      for (NodeId place : graph.parents(id, Relation::kPlaceInRoom)) {
        const auto& p = graph.get<PlaceAttr>(place);
        if (!room->aabb.contains(p.position, kBoxSlack)) {
          add("room-containment", place, "place outside its room box");
        }
        for (NodeId obj : graph.parents(place, Relation::kProximal)) {
          if (!room->aabb.contains(graph.get<ObjectAttr>(obj).aabb, kBoxSlack)) {
            add("room-containment", obj, "object box exceeds its room box");
          }
        }
        for (EdgeId eid : graph.in_edges(place)) {
          const Edge& e = graph.edges().at(eid);
          if (e.relation != Relation::kAgentAtPlace || !e.t) {
            continue;
          }
          const auto& agent = graph.get<AgentAttr>(e.src);
          const Pose* pose = agent_pose_at(agent, *e.t);
          if (pose == nullptr) {
            add("agent-at-place-time", e.src, "agent-at-place timestamp has no pose");
          } else if (!room->aabb.contains(pose->translation, kBoxSlack)) {
            add("room-containment", e.src, "agent pose outside its room box");
          }
        }
      }
    }
  }
  return report;
}

void refresh_room_boxes(SceneGraph& graph) {
  const auto rooms = graph.nodes_of<RoomAttr>();
  Aabb all;
  for (NodeId room_id : rooms) {
    Aabb box;
    Vec3 sum = Vec3::Zero();
    std::size_t n = 0;
    for (NodeId place : graph.parents(room_id, Relation::kPlaceInRoom)) {
      const auto& p = graph.get<PlaceAttr>(place);
      box.extend(p.position);
      sum += p.position;
      ++n;
      for (NodeId obj : graph.parents(place, Relation::kProximal)) {
        box.extend(graph.get<ObjectAttr>(obj).aabb);
      }
      for (EdgeId eid : graph.in_edges(place)) {
        const Edge& e = graph.edges().at(eid);
        if (e.relation == Relation::kAgentAtPlace && e.t) {
          if (const Pose* pose = agent_pose_at(graph.get<AgentAttr>(e.src), *e.t)) {
            box.extend(pose->translation);
          }
        }
      }
    }
    auto& room = graph.get<RoomAttr>(room_id);
    if (!box.empty()) {
      room.aabb = box;
      room.pose = Pose(sum / static_cast<double>(n));
    }
    all.extend(room.aabb);
  }
  if (auto b = graph.building(); b && !all.empty()) {
    auto& building = graph.get<BuildingAttr>(*b);
    building.aabb = all;
    building.pose = Pose(all.center());
  }
}

}  // namespace dsg
