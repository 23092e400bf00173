#include "dsg/graph_io.hpp"
#include "dsg/query.hpp"
#include "dsg/scene_graph.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace dsg;

TEST_SUITE("scene-graph") {

TEST_CASE("node ids carry their layer") {
  const NodeId id(Layer::kRooms, 42);
  CHECK(id.layer() == Layer::kRooms);
  CHECK(id.index() == 42);
  CHECK(NodeId::from_raw(id.value()) == id);
  CHECK_FALSE(NodeId().valid());
}

TEST_CASE("add_node assigns the attribute layer") {
  SceneGraph g;
  const NodeId place = g.add_node(PlaceAttr{});
  const NodeId room = g.add_node(RoomAttr{});
  const NodeId vertex = g.add_node(MeshVertexAttr{});
  CHECK(place.layer() == Layer::kPlacesStructures);
  CHECK(room.layer() == Layer::kRooms);
  CHECK(vertex.layer() == Layer::kMesh);
  CHECK(g.mesh().vertices.size() == 1);
  CHECK_THROWS_AS(g.add_node(Layer::kRooms, PlaceAttr{}), GraphError);
}

TEST_CASE("attribute contracts are enforced on insert") {
  SceneGraph g;
  MeshVertexAttr v;
  v.normal = Vec3(2.0, 0.0, 0.0);
  CHECK_THROWS_AS(g.add_node(v), GraphError);

  ObjectAttr o;  // empty box
  CHECK_THROWS_AS(g.add_node(o), GraphError);

  AgentAttr a;
  a.track.states = {{1.0, Pose()}, {1.0, Pose()}};
  CHECK_THROWS_AS(g.add_node(a), GraphError);
}

TEST_CASE("edges respect the relation table") {
  SceneGraph g;
  const NodeId p1 = g.add_node(PlaceAttr{});
  const NodeId p2 = g.add_node(PlaceAttr{});
  const NodeId room = g.add_node(RoomAttr{});
  const NodeId building = g.add_node(BuildingAttr{});
  AgentAttr agent;
  agent.track.states = {{0.0, Pose()}};
  const NodeId a = g.add_node(agent);

  g.add_edge(p1, p2, Relation::kTraversable);
  g.add_edge(p1, room, Relation::kPlaceInRoom);
  g.add_edge(room, building, Relation::kRoomInBuilding);
  CHECK(g.get<PlaceAttr>(p1).room == room);
  CHECK(g.room_of_place(p1) == room);
  CHECK(g.building() == building);

  CHECK_THROWS_AS(g.add_edge(room, p1, Relation::kPlaceInRoom), GraphError);
  CHECK_THROWS_AS(g.add_edge(p1, building, Relation::kRoomInBuilding), GraphError);
  CHECK_THROWS_AS(g.add_edge(a, p1, Relation::kAgentAtPlace), GraphError);
  CHECK_NOTHROW(g.add_edge(a, p1, Relation::kAgentAtPlace, 0.0));
  CHECK_THROWS_AS(g.add_edge(p1, NodeId(Layer::kPlacesStructures, 999), Relation::kTraversable),
                  GraphError);
}

TEST_CASE("neighbors over undirected relations see both directions") {
  SceneGraph g;
  const NodeId a = g.add_node(PlaceAttr{});
  const NodeId b = g.add_node(PlaceAttr{});
  const NodeId c = g.add_node(PlaceAttr{});
  g.add_edge(a, b, Relation::kTraversable);
  g.add_edge(c, a, Relation::kTraversable);
  auto n = g.neighbors(a, Relation::kTraversable);
  std::sort(n.begin(), n.end());
  CHECK(n == std::vector<NodeId>{b, c});
  CHECK(g.children(a, Relation::kTraversable) == std::vector<NodeId>{b});
  CHECK(g.parents(a, Relation::kTraversable) == std::vector<NodeId>{c});
}

TEST_CASE("remove_node drops every touching edge") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    SceneGraph g = test::random_graph(rng);
    const auto places = g.nodes_of<PlaceAttr>();
    g.remove_node(places.front());
    for (const auto& [eid, e] : g.edges()) {
      CHECK(e.src != places.front());
      CHECK(e.dst != places.front());
    }
    CHECK(test::dangling_edges(g) == 0);
  }
}

TEST_CASE("mesh vertex removal reindexes faces and edges") {
  SceneGraph g;
  for (int i = 0; i < 4; ++i) {
    MeshVertexAttr v;
    v.position = Vec3(i, 0, 0);
    g.add_node(v);
  }
  g.add_face(0, 1, 2);
  g.add_face(1, 2, 3);
  const Vec3 c(1.5, 0, 0);
  const NodeId obj = g.add_node(ObjectAttr{Pose(c), Aabb(Vec3(0, -1, -1), Vec3(3, 1, 1)),
                                           classes::kChair, std::nullopt});
  g.add_edge(obj, NodeId(Layer::kMesh, 3), Relation::kObjectContainsVertices);
  g.remove_mesh_vertices({0});
  REQUIRE(g.mesh().vertices.size() == 3);
  CHECK(g.mesh().vertices[0].position.x() == 1.0);
  REQUIRE(g.mesh().faces.size() == 1);
  CHECK(g.mesh().faces[0] == std::array<std::uint32_t, 3>{0, 1, 2});
  CHECK(g.children(obj, Relation::kObjectContainsVertices) ==
        std::vector<NodeId>{NodeId(Layer::kMesh, 2)});
}

TEST_CASE("random graphs validate") {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const SceneGraph g = test::random_graph(rng);
    const auto report = validate(g);
    CHECK_MESSAGE(report.ok(), (report.ok() ? "" : report.violations.front().message));
  }
}

TEST_CASE("validate reports broken contracts") {
  std::mt19937 rng(3);
  SceneGraph g = test::random_graph(rng);
  REQUIRE(validate(g).ok());

  SUBCASE("orphan place") {
    g.add_node(PlaceAttr{Vec3(1, 1, 1), 0.5, std::nullopt});
    CHECK(validate(g).count("place-without-room") == 1);
  }
  SUBCASE("orphan object") {
    const Vec3 c(1, 1, 1);
    g.add_node(ObjectAttr{Pose(c), Aabb(c, c), classes::kSofa, std::nullopt});
    CHECK(validate(g).count("object-without-place") == 1);
  }
  SUBCASE("room box too small") {
    const NodeId room = g.nodes_of<RoomAttr>().front();
    g.get<RoomAttr>(room).aabb = Aabb(Vec3(100, 100, 100), Vec3(101, 101, 101));
    CHECK(validate(g).count("room-containment") > 0);
  }
  SUBCASE("room without building") {
    g.add_node(RoomAttr{});
    CHECK(validate(g).count("room-without-building") == 1);
  }
  SUBCASE("second building") {
    g.add_node(BuildingAttr{});
    CHECK(validate(g).count("multiple-buildings") == 1);
  }
}

TEST_CASE("serialization round-trips") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const SceneGraph g = test::random_graph(rng);
    const SceneGraph back = deserialize(serialize(g));
    CHECK(back == g);
    CHECK(serialize(back) == serialize(g));
  }
}

TEST_CASE("deserialize rejects malformed input") {
  CHECK_THROWS_AS(deserialize("{"), ParseError);
  CHECK_THROWS_AS(deserialize("[]"), ParseError);
  CHECK_THROWS_AS(deserialize(R"({"nodes": [], "edges": []})"), ParseError);

  std::mt19937 rng(5);
  Json doc = graph_to_json(test::random_graph(rng));
  doc["version"] = kGraphFormatVersion + 1;
  CHECK_THROWS_AS(graph_from_json(doc), ParseError);
}

TEST_CASE("room boxes cover their contents after refresh") {
  std::mt19937 rng(9);
  SceneGraph g = test::random_graph(rng);
  const NodeId place = g.nodes_of<PlaceAttr>().front();
  g.get<PlaceAttr>(place).position += Vec3(0.0, 0.0, 25.0);
  CHECK_FALSE(validate(g).ok());
  refresh_room_boxes(g);
  CHECK(validate(g).ok());
}

}  // TEST_SUITE
