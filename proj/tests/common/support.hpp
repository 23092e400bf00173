#pragma once

#include "dsg/geometry.hpp"

#include <random>

namespace dsg::test {

inline Vec3 random_vec(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

inline Quat random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

inline Pose random_pose(std::mt19937& rng, double extent = 2.0) {
  return {random_rotation(rng), random_vec(rng, -extent, extent)};
}

}  // namespace dsg::test

#include "dsg/scene_graph.hpp"

#include <vector>

namespace dsg::test {

/// Random graph satisfying every layer contract: a building, rooms, places
/// with traversable edges, objects holding mesh vertices, structures and
/// agents visiting places.
inline SceneGraph random_graph(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_rooms(1, 4);
  std::uniform_int_distribution<int> n_places(1, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SceneGraph g;
  const NodeId building = g.add_node(BuildingAttr{});
  std::vector<NodeId> rooms;
  std::vector<NodeId> places;
  const int room_count = n_rooms(rng);
  for (int r = 0; r < room_count; ++r) {
    const NodeId room = g.add_node(RoomAttr{});
    g.add_edge(room, building, Relation::kRoomInBuilding);
    if (!rooms.empty() && u(rng) < 0.7) {
      g.add_edge(rooms.back(), room, Relation::kRoomAdjacent);
    }
    rooms.push_back(room);
    const int place_count = n_places(rng);
    for (int p = 0; p < place_count; ++p) {
      PlaceAttr attr;
      attr.position = Vec3(4.0 * r, 0.0, 1.0) + random_vec(rng, 0.0, 3.0);
      attr.clearance = 0.3 + u(rng);
      const NodeId place = g.add_node(attr);
      g.add_edge(place, room, Relation::kPlaceInRoom);
      if (!places.empty() && u(rng) < 0.8) {
        g.add_edge(places.back(), place, Relation::kTraversable);
      }
      places.push_back(place);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, places.size() - 1);
  const int objects = static_cast<int>(u(rng) * 5);
  for (int o = 0; o < objects; ++o) {
    const NodeId place = places[pick(rng)];
    const Vec3 c = g.get<PlaceAttr>(place).position + random_vec(rng, -0.5, 0.5);
    ObjectAttr attr;
    attr.pose = Pose::from_yaw(u(rng) * 3.0, c);
    attr.aabb = Aabb(c - Vec3::Constant(0.3), c + Vec3::Constant(0.3));
    attr.cls = static_cast<ClassId>(classes::kChair + o % 5);
    if (u(rng) < 0.3) {
      attr.known_shape = "cad_" + std::to_string(o);
    }
    const NodeId obj = g.add_node(attr);
    g.add_edge(obj, place, Relation::kProximal);
    const std::uint32_t first = static_cast<std::uint32_t>(g.mesh().vertices.size());
    for (int v = 0; v < 3; ++v) {
      MeshVertexAttr vertex;
      vertex.position = c + random_vec(rng, -0.3, 0.3);
      vertex.normal = random_vec(rng, -1.0, 1.0).normalized();
      vertex.label = attr.cls;
      const NodeId vid = g.add_node(vertex);
      g.add_edge(obj, vid, Relation::kObjectContainsVertices);
    }
    g.add_face(first, first + 1, first + 2);
  }
  if (u(rng) < 0.8) {
    const Vec3 c = random_vec(rng, 0.0, 3.0);
    g.add_node(StructureAttr{Pose(c), Aabb(c - Vec3::Constant(0.1), c + Vec3::Constant(1.0)),
                             classes::kWall});
  }
  const int agents = static_cast<int>(u(rng) * 3);
  for (int a = 0; a < agents; ++a) {
    AgentAttr attr;
    attr.cls = a % 2 == 0 ? AgentClass::kHuman : AgentClass::kRobot;
    attr.track.id = static_cast<std::uint64_t>(a + 1);
    attr.track.cls = attr.cls;
    std::vector<NodeId> visited;
    for (int k = 0; k < 3; ++k) {
      const NodeId place = places[pick(rng)];
      const double t = 0.5 * k;
      const Pose pose = Pose::from_yaw(u(rng), g.get<PlaceAttr>(place).position);
      attr.track.states.push_back({t, pose});
      attr.track.priors.push_back({static_cast<std::size_t>(k), t, pose, 1.0});
      if (k > 0) {
        attr.track.motion.push_back(
            {static_cast<std::size_t>(k - 1), static_cast<std::size_t>(k), 0.5 * (k - 1), t, 4.0});
      }
      attr.track.skeletons.emplace_back(2, pose.translation);
      visited.push_back(place);
    }
    const NodeId agent = g.add_node(attr);
    for (std::size_t k = 0; k < visited.size(); ++k) {
      g.add_edge(agent, visited[k], Relation::kAgentAtPlace, 0.5 * static_cast<double>(k));
    }
  }
  refresh_room_boxes(g);
  return g;
}

/// Edges whose endpoint no longer exists.
inline std::size_t dangling_edges(const SceneGraph& g) {
  auto exists = [&](NodeId id) {
    if (id.layer() == Layer::kMesh) {
      return id.index() < g.mesh().vertices.size();
    }
    return g.nodes().count(id) > 0;
  };
  std::size_t n = 0;
  for (const auto& [eid, e] : g.edges()) {
    n += exists(e.src) && exists(e.dst) ? 0 : 1;
  }
  return n;
}

}  // namespace dsg::test
