#include "dsg/query.hpp"
#include "dsg/scene_graph.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <random>

using namespace dsg;

namespace {

bool adjacent(const SceneGraph& g, NodeId a, NodeId b) {
  const auto n = g.neighbors(a, Relation::kTraversable);
  return std::find(n.begin(), n.end(), b) != n.end();
}

Aabb random_box(std::mt19937& rng) {
  const Vec3 a = test::random_vec(rng, -1.0, 16.0);
  const Vec3 e = test::random_vec(rng, 0.0, 3.0);
  return {a, a + e};
}

}  // namespace

TEST_SUITE("query") {

TEST_CASE("BVH box queries equal a scan over all leaves") {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 250; ++trial) {
    const SceneGraph g = test::random_graph(rng);
    const Bvh bvh = build_bvh(g);
    for (int q = 0; q < 5; ++q) {
      const Aabb box = random_box(rng);
      CHECK(bvh.query(box) == collision_scan(g, box));
    }
  }
}

TEST_CASE("BVH segment queries equal a scan over all leaves") {
  std::mt19937 rng(67);
  for (int trial = 0; trial < 250; ++trial) {
    const SceneGraph g = test::random_graph(rng);
    const Bvh bvh = build_bvh(g);
    for (int q = 0; q < 5; ++q) {
      const Vec3 a = test::random_vec(rng, -1.0, 16.0);
      const Vec3 b = test::random_vec(rng, -1.0, 16.0);
      CHECK(bvh.query(a, b) == collision_scan(g, a, b));
    }
  }
}

TEST_CASE("BVH boxes contain their children") {
  std::mt19937 rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const SceneGraph g = test::random_graph(rng);
    const Bvh bvh = build_bvh(g);
    auto leaves = bvh.leaves();
    std::sort(leaves.begin(), leaves.end());
    CHECK(leaves.size() == g.nodes_of<ObjectAttr>().size() + g.nodes_of<StructureAttr>().size());
    for (const auto& node : bvh.nodes()) {
      for (const auto c : node.children) {
        CHECK(node.box.contains(bvh.nodes()[c].box));
      }
    }
  }
}

TEST_CASE("Dijkstra equals Bellman-Ford") {
  std::mt19937 rng(73);
  for (int trial = 0; trial < 250; ++trial) {
    const SceneGraph g = test::random_place_graph(rng);
    const auto places = g.nodes_of<PlaceAttr>();
    const NodeId from = places.front();
    const auto oracle = test::bellman_ford(g, from);
    for (const NodeId to : places) {
      const auto path = plan_path(g, from, to);
      if (std::isinf(oracle.at(to))) {
        CHECK_FALSE(path);
        continue;
      }
      REQUIRE(path);
      CHECK(std::abs(path->length - oracle.at(to)) <= 1e-9);
      REQUIRE(path->places.front() == from);
      REQUIRE(path->places.back() == to);
      double walked = 0.0;
      for (std::size_t k = 1; k < path->places.size(); ++k) {
        CHECK(adjacent(g, path->places[k - 1], path->places[k]));
        walked += (g.get<PlaceAttr>(path->places[k]).position -
                   g.get<PlaceAttr>(path->places[k - 1]).position)
                      .norm();
      }
      CHECK(std::abs(walked - path->length) <= 1e-9);
    }
  }
}

TEST_CASE("planning rejects ids that are not places") {
  std::mt19937 rng(3);
  const SceneGraph g = test::random_graph(rng);
  const NodeId place = g.nodes_of<PlaceAttr>().front();
  CHECK_THROWS_AS((void)plan_path(g, place, g.nodes_of<RoomAttr>().front()), QueryError);
  CHECK_THROWS_AS((void)plan_path(g, NodeId(Layer::kMesh, 0), place), QueryError);
}

TEST_CASE("plan_to_object picks the nearest reachable instance") {
  SceneGraph g;
  std::vector<NodeId> p;
  for (int i = 0; i < 4; ++i) {
    p.push_back(g.add_node(PlaceAttr{Vec3(i, 0, 1), 0.5, std::nullopt}));
  }
  const NodeId island = g.add_node(PlaceAttr{Vec3(0.5, 0, 1), 0.5, std::nullopt});
  g.add_edge(p[0], p[1], Relation::kTraversable);
  g.add_edge(p[1], p[2], Relation::kTraversable);
  g.add_edge(p[2], p[3], Relation::kTraversable);
  auto object = [&](NodeId place, ClassId cls) {
    const Vec3 c = g.get<PlaceAttr>(place).position;
    const NodeId o = g.add_node(ObjectAttr{Pose(c), Aabb(c, c), cls, std::nullopt});
    g.add_edge(o, place, Relation::kProximal);
    return o;
  };
  const NodeId far_chair = object(p[3], classes::kChair);
  const NodeId near_chair = object(p[2], classes::kChair);
  object(island, classes::kChair);
  const NodeId table = object(island, classes::kTable);

  const ObjectPath to_chair = plan_to_object(g, classes::kChair, p[0]);
  CHECK(to_chair.object == near_chair);
  CHECK(to_chair.path.length == doctest::Approx(2.0));
  CHECK(to_chair.path.places == std::vector<NodeId>{p[0], p[1], p[2]});
  CHECK(plan_to_object(g, far_chair, p[0]).path.length == doctest::Approx(3.0));
  CHECK_THROWS_AS((void)plan_to_object(g, table, p[0]), QueryError);
  CHECK_THROWS_AS((void)plan_to_object(g, classes::kSofa, p[0]), QueryError);
  CHECK_THROWS_AS((void)plan_to_object(g, p[1], p[0]), QueryError);
}

TEST_CASE("agent_at_time interpolates and locates the agent") {
  SceneGraph g;
  const NodeId room = g.add_node(RoomAttr{});
  const NodeId building = g.add_node(BuildingAttr{});
  g.add_edge(room, building, Relation::kRoomInBuilding);
  const NodeId a = g.add_node(PlaceAttr{Vec3(0, 0, 1), 0.5, std::nullopt});
  const NodeId b = g.add_node(PlaceAttr{Vec3(2, 0, 1), 0.5, std::nullopt});
  g.add_edge(a, room, Relation::kPlaceInRoom);
  g.add_edge(b, room, Relation::kPlaceInRoom);
  AgentAttr attr;
  attr.track.states = {{0.0, Pose::from_yaw(0.0, Vec3(0, 0, 1))},
                       {1.0, Pose::from_yaw(1.0, Vec3(2, 0, 1))}};
  const NodeId agent = g.add_node(attr);

  const AgentSample mid = agent_at_time(g, agent, 0.75);
  CHECK((mid.pose.translation - Vec3(1.5, 0, 1)).norm() < 1e-12);
  CHECK(mid.pose.yaw() == doctest::Approx(0.75));
  CHECK(mid.place == b);
  CHECK(mid.room == room);
  CHECK(agent_at_time(g, agent, 1.0).pose == attr.track.states[1].pose);
  CHECK_THROWS_AS((void)agent_at_time(g, agent, 1.5), QueryError);
  CHECK_THROWS_AS((void)agent_at_time(g, a, 0.5), QueryError);
}

TEST_CASE("nearest place ties go to the lowest id") {
  SceneGraph g;
  CHECK_FALSE(nearest_place(g, Vec3::Zero()));
  const NodeId a = g.add_node(PlaceAttr{Vec3(-1, 0, 0), 0.5, std::nullopt});
  g.add_node(PlaceAttr{Vec3(1, 0, 0), 0.5, std::nullopt});
  CHECK(nearest_place(g, Vec3::Zero()) == a);
}

TEST_CASE("pruning leaves no dangling edges") {
  std::mt19937 rng(79);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    SceneGraph g = test::random_graph(rng);
    std::vector<NodeId> candidates = g.nodes_of<RoomAttr>();
    for (const NodeId id : g.nodes_of<PlaceAttr>()) {
      candidates.push_back(id);
    }
    for (const NodeId id : g.nodes_of<ObjectAttr>()) {
      candidates.push_back(id);
    }
    const NodeId target = candidates[static_cast<std::size_t>(u(rng) * candidates.size())];
    const auto removed = prune_branch(g, target);
    CHECK(std::find(removed.begin(), removed.end(), target) != removed.end());
    for (const NodeId id : removed) {
      CHECK_FALSE(g.has_node(id));
    }
    CHECK(test::dangling_edges(g) == 0);
    for (const auto& face : g.mesh().faces) {
      for (const auto v : face) {
        CHECK(v < g.mesh().vertices.size());
      }
    }
  }
}

TEST_CASE("pruning a room removes its places and their objects") {
  std::mt19937 rng(83);
  SceneGraph g = test::random_graph(rng);
  const NodeId room = g.nodes_of<RoomAttr>().front();
  const auto places = g.parents(room, Relation::kPlaceInRoom);
  std::size_t objects = 0;
  for (const NodeId p : places) {
    objects += g.parents(p, Relation::kProximal).size();
  }
  const auto removed = prune_branch(g, room);
  CHECK(removed.size() == 1 + places.size() + objects);
}

TEST_CASE("pruning refuses the mesh, the building and unknown ids") {
  std::mt19937 rng(89);
  SceneGraph g = test::random_graph(rng);
  CHECK_THROWS_AS(prune_branch(g, *g.building()), QueryError);
  CHECK_THROWS_AS(prune_branch(g, NodeId(Layer::kMesh, 0)), QueryError);
  CHECK_THROWS_AS(prune_branch(g, NodeId(Layer::kRooms, 999)), QueryError);
}

}  // TEST_SUITE
