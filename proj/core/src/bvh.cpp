#include "dsg/query.hpp"

#include <algorithm>
#include <set>

namespace dsg {

namespace {

const Aabb* leaf_box(const SceneGraph& graph, NodeId id) {
  const NodeAttributes& a = graph.attributes(id);
  if (const auto* o = std::get_if<ObjectAttr>(&a)) {
    return &o->aabb;
  }
  if (const auto* s = std::get_if<StructureAttr>(&a)) {
    return &s->aabb;
  }
  return nullptr;
}

template <typename Hit>
std::vector<NodeId> traverse(const std::vector<Bvh::Node>& nodes, Hit hit) {
  std::vector<NodeId> out;
  if (nodes.empty()) {
    return out;
  }
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Bvh::Node& n = nodes[stack.back()];
    stack.pop_back();
    if (n.box.empty() || !hit(n.box)) {
      continue;
    }
    if (n.leaf) {
      out.push_back(n.ref);
      continue;
    }
    stack.insert(stack.end(), n.children.begin(), n.children.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<NodeId> Bvh::leaves() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.leaf) {
      out.push_back(n.ref);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> Bvh::query(const Aabb& box) const {
  return traverse(nodes_, [&](const Aabb& b) { return b.intersects(box); });
}

std::vector<NodeId> Bvh::query(const Vec3& a, const Vec3& b) const {
  return traverse(nodes_, [&](const Aabb& box) { return box.intersects_segment(a, b); });
}

Bvh build_bvh(const SceneGraph& graph) {
  Bvh bvh;
  auto& nodes = bvh.nodes_;
  nodes.push_back({});
  nodes[0].ref = graph.building().value_or(NodeId{});
  std::set<NodeId> placed;

  auto add_child = [&](std::uint32_t parent, Bvh::Node node) {
    const auto index = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back(std::move(node));
    nodes[parent].children.push_back(index);
    return index;
  };
  auto add_leaf = [&](std::uint32_t parent, NodeId id) {
    const Aabb* box = leaf_box(graph, id);
    if (box == nullptr || placed.count(id) != 0) {
      return;
    }
    placed.insert(id);
    add_child(parent, {*box, id, {}, true});
  };

  std::vector<NodeId> rooms;
  if (nodes[0].ref.valid()) {
    rooms = graph.parents(nodes[0].ref, Relation::kRoomInBuilding);
  }
  std::sort(rooms.begin(), rooms.end());
  for (NodeId room : rooms) {
    const std::uint32_t r = add_child(0, {Aabb{}, room, {}, false});
    auto places = graph.parents(room, Relation::kPlaceInRoom);
    std::sort(places.begin(), places.end());
    for (NodeId place : places) {
      auto objects = graph.parents(place, Relation::kProximal);
      if (objects.empty()) {
        continue;
      }
      std::sort(objects.begin(), objects.end());
      const std::uint32_t p = add_child(r, {Aabb{}, place, {}, false});
      for (NodeId obj : objects) {
        add_leaf(p, obj);
      }
    }
  }
  for (NodeId id : graph.nodes_of<ObjectAttr>()) {
    add_leaf(0, id);
  }
  for (NodeId id : graph.nodes_of<StructureAttr>()) {
    add_leaf(0, id);
  }

  // children always follow their parent, so a reverse sweep sees them first
  for (std::size_t i = nodes.size(); i-- > 0;) {
    Bvh::Node& n = nodes[i];
    if (n.leaf) {
      continue;
    }
    Aabb box;
    for (const auto c : n.children) {
      box.extend(nodes[c].box);
    }
    n.box = box.empty() ? box : box.inflated(kBoxSlack);
  }
  return bvh;
}

std::vector<NodeId> collision_scan(const SceneGraph& graph, const Aabb& box) {
  std::vector<NodeId> out;
  for (const auto& [id, node] : graph.nodes()) {
    if (const Aabb* b = leaf_box(graph, id); b != nullptr && b->intersects(box)) {
      out.push_back(id);
    }
  }
  return out;
}

std::vector<NodeId> collision_scan(const SceneGraph& graph, const Vec3& a, const Vec3& b) {
  std::vector<NodeId> out;
  for (const auto& [id, node] : graph.nodes()) {
    if (const Aabb* box = leaf_box(graph, id); box != nullptr && box->intersects_segment(a, b)) {
      out.push_back(id);
    }
  }
  return out;
}

}  // namespace dsg
