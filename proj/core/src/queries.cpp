#include "dsg/query.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

namespace dsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ShortestPaths {
  std::unordered_map<NodeId, double> dist;
  std::unordered_map<NodeId, NodeId> prev;
};

void require_place(const SceneGraph& graph, NodeId id) {
  if (id.layer() == Layer::kMesh || !graph.has_node(id) ||
      !std::holds_alternative<PlaceAttr>(graph.attributes(id))) {
    throw QueryError("not a place: " + std::to_string(id.value()));
  }
}

ShortestPaths dijkstra(const SceneGraph& graph, NodeId from) {
  ShortestPaths sp;
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  sp.dist[from] = 0.0;
  queue.push({0.0, from});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > sp.dist[u]) {
      continue;
    }
    const Vec3& pu = graph.get<PlaceAttr>(u).position;
    for (NodeId v : graph.neighbors(u, Relation::kTraversable)) {
      const double nd = d + (graph.get<PlaceAttr>(v).position - pu).norm();
      const auto it = sp.dist.find(v);
      if (it == sp.dist.end() || nd < it->second) {
        sp.dist[v] = nd;
        sp.prev[v] = u;
        queue.push({nd, v});
      }
    }
  }
  return sp;
}

PathResult walk_back(const ShortestPaths& sp, NodeId from, NodeId to) {
  PathResult path;
  path.length = sp.dist.at(to);
  for (NodeId v = to; v != from; v = sp.prev.at(v)) {
    path.places.push_back(v);
  }
  path.places.push_back(from);
  std::reverse(path.places.begin(), path.places.end());
  return path;
}

}  // namespace

std::optional<PathResult> plan_path(const SceneGraph& graph, NodeId from, NodeId to) {
  require_place(graph, from);
  require_place(graph, to);
  const ShortestPaths sp = dijkstra(graph, from);
  if (sp.dist.count(to) == 0) {
    return std::nullopt;
  }
  return walk_back(sp, from, to);
}

ObjectPath plan_to_object(const SceneGraph& graph, const std::variant<NodeId, ClassId>& target,
                          NodeId from) {
  require_place(graph, from);
  std::vector<NodeId> candidates;
  if (const auto* id = std::get_if<NodeId>(&target)) {
    if (id->layer() == Layer::kMesh || !graph.has_node(*id) ||
        !std::holds_alternative<ObjectAttr>(graph.attributes(*id))) {
      throw QueryError("not an object: " + std::to_string(id->value()));
    }
    candidates.push_back(*id);
  } else {
    const ClassId cls = std::get<ClassId>(target);
    for (NodeId id : graph.nodes_of<ObjectAttr>()) {
      if (graph.get<ObjectAttr>(id).cls == cls) {
        candidates.push_back(id);
      }
    }
  }
  const ShortestPaths sp = dijkstra(graph, from);
  std::optional<ObjectPath> best;
  for (NodeId obj : candidates) {
    const auto place = graph.parent_place(obj);
    if (!place) {
      continue;
    }
    const auto it = sp.dist.find(*place);
    if (it == sp.dist.end()) {
      continue;
    }
    if (!best || it->second < best->path.length) {
      best = ObjectPath{obj, walk_back(sp, from, *place)};
    }
  }
  if (!best) {
    throw QueryError("no reachable object matches the request");
  }
  return *best;
}

std::optional<NodeId> nearest_place(const SceneGraph& graph, const Vec3& p) {
  std::optional<NodeId> best;
  double best_d = kInf;
  for (const auto& [id, node] : graph.nodes()) {
    if (const auto* place = std::get_if<PlaceAttr>(&node.attrs)) {
      const double d = (place->position - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = id;
      }
    }
  }
  return best;
}

AgentSample agent_at_time(const SceneGraph& graph, NodeId agent, double t) {
  if (agent.layer() == Layer::kMesh || !graph.has_node(agent) ||
      !std::holds_alternative<AgentAttr>(graph.attributes(agent))) {
    throw QueryError("not an agent: " + std::to_string(agent.value()));
  }
  const auto& states = graph.get<AgentAttr>(agent).track.states;
  if (states.empty() || t < states.front().t || t > states.back().t) {
    throw QueryError("time outside the agent's track");
  }
  const auto it = std::lower_bound(states.begin(), states.end(), t,
                                   [](const TrackState& s, double v) { return s.t < v; });
  AgentSample out;
  if (it->t == t) {
    out.pose = it->pose;
  } else {
    const TrackState& a = *(it - 1);
    out.pose = interpolate(a.pose, it->pose, (t - a.t) / (it->t - a.t));
  }
  out.place = nearest_place(graph, out.pose.translation);
  if (out.place) {
    out.room = graph.room_of_place(*out.place);
  }
  return out;
}

std::vector<NodeId> prune_branch(SceneGraph& graph, NodeId node) {
  if (node.layer() == Layer::kMesh || node.layer() == Layer::kBuilding) {
    throw QueryError("only layer 2-4 nodes can be pruned");
  }
  if (!graph.has_node(node)) {
    throw QueryError("unknown node " + std::to_string(node.value()));
  }
  std::vector<NodeId> removed{node};
  std::vector<std::uint32_t> vertices;
  auto collect_object = [&](NodeId obj) {
    for (NodeId v : graph.children(obj, Relation::kObjectContainsVertices)) {
      vertices.push_back(static_cast<std::uint32_t>(v.index()));
    }
  };
  auto collect_place = [&](NodeId place) {
    for (NodeId obj : graph.parents(place, Relation::kProximal)) {
      removed.push_back(obj);
      collect_object(obj);
    }
  };
  const NodeAttributes& attrs = graph.attributes(node);
  if (std::holds_alternative<RoomAttr>(attrs)) {
    for (NodeId place : graph.parents(node, Relation::kPlaceInRoom)) {
      removed.push_back(place);
      collect_place(place);
    }
  } else if (std::holds_alternative<PlaceAttr>(attrs)) {
    collect_place(node);
  } else if (std::holds_alternative<ObjectAttr>(attrs)) {
    collect_object(node);
  }
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());
  for (NodeId id : removed) {
    graph.remove_node(id);
  }
  graph.remove_mesh_vertices(vertices);
  refresh_room_boxes(graph);
  return removed;
}

}  // namespace dsg
