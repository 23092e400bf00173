#include "dsg/graph_io.hpp"

#include <limits>

namespace dsg {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) {
    throw ParseError(std::string("expected an object holding '") + key + "'");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  return *it;
}

Json vec3_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("expected [x, y, z]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json quat_to_json(const Quat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

Quat quat_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError("expected quaternion [w, x, y, z]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Json pose_to_json(const Pose& p) {
  return Json{{"p", vec3_to_json(p.translation)}, {"q", quat_to_json(p.rotation)}};
}

Pose pose_from_json(const Json& j) {
  Pose p;
  p.translation = vec3_from_json(require(j, "p"));
  p.rotation = quat_from_json(require(j, "q"));
  return p;
}

Json aabb_to_json(const Aabb& b) {
  if (b.empty()) {
    return nullptr;
  }
  return Json{{"min", vec3_to_json(b.min)}, {"max", vec3_to_json(b.max)}};
}

Aabb aabb_from_json(const Json& j) {
  if (j.is_null()) {
    return {};
  }
  return {vec3_from_json(require(j, "min")), vec3_from_json(require(j, "max"))};
}

Json track_to_json(const AgentTrack& track) {
  Json states = Json::array();
  for (const auto& s : track.states) {
    Json js = pose_to_json(s.pose);
    js["t"] = s.t;
    states.push_back(std::move(js));
  }
  Json priors = Json::array();
  for (const auto& f : track.priors) {
    Json jf = pose_to_json(f.measurement);
    jf["state"] = f.state;
    jf["t"] = f.t;
    jf["w"] = f.weight;
    priors.push_back(std::move(jf));
  }
  Json motion = Json::array();
  for (const auto& f : track.motion) {
    motion.push_back(
        {{"from", f.from}, {"to", f.to}, {"t_from", f.t_from}, {"t_to", f.t_to}, {"w", f.weight}});
  }
  Json skeletons = Json::array();
  for (const auto& sk : track.skeletons) {
    Json joints = Json::array();
    for (const auto& p : sk) {
      joints.push_back(vec3_to_json(p));
    }
    skeletons.push_back(std::move(joints));
  }
  return Json{{"id", track.id},
              {"class", agent_class_name(track.cls)},
              {"states", std::move(states)},
              {"priors", std::move(priors)},
              {"motion", std::move(motion)},
              {"skeletons", std::move(skeletons)}};
}

AgentTrack track_from_json(const Json& j) {
  AgentTrack track;
  track.id = require(j, "id").get<std::uint64_t>();
  track.cls = require(j, "class").get<std::string>() == "robot" ? AgentClass::kRobot
                                                                 : AgentClass::kHuman;
  for (const auto& js : require(j, "states")) {
    track.states.push_back({require(js, "t").get<double>(), pose_from_json(js)});
  }
  for (const auto& jf : require(j, "priors")) {
    PriorFactor f;
    f.state = require(jf, "state").get<std::size_t>();
    f.t = require(jf, "t").get<double>();
    f.measurement = pose_from_json(jf);
    f.weight = require(jf, "w").get<double>();
    track.priors.push_back(f);
  }
  for (const auto& jf : require(j, "motion")) {
    ZeroVelocityFactor f;
    f.from = require(jf, "from").get<std::size_t>();
    f.to = require(jf, "to").get<std::size_t>();
    f.t_from = require(jf, "t_from").get<double>();
    f.t_to = require(jf, "t_to").get<double>();
    f.weight = require(jf, "w").get<double>();
    track.motion.push_back(f);
  }
  if (auto it = j.find("skeletons"); it != j.end()) {
    for (const auto& joints : *it) {
      Skeleton sk;
      for (const auto& p : joints) {
        sk.push_back(vec3_from_json(p));
      }
      track.skeletons.push_back(std::move(sk));
    }
  }
  return track;
}

namespace {

Json attrs_to_json(const NodeAttributes& attrs) {
  struct Visitor {
    Json operator()(const MeshVertexAttr&) const { return nullptr; }
    Json operator()(const ObjectAttr& o) const {
      Json j{{"kind", "object"},
             {"pose", pose_to_json(o.pose)},
             {"aabb", aabb_to_json(o.aabb)},
             {"class", o.cls}};
      if (o.known_shape) {
        j["known_shape"] = *o.known_shape;
      }
      return j;
    }
    Json operator()(const AgentAttr& a) const {
      return Json{{"kind", "agent"},
                  {"class", agent_class_name(a.cls)},
                  {"track", track_to_json(a.track)}};
    }
    Json operator()(const PlaceAttr& p) const {
      Json j{{"kind", "place"},
             {"position", vec3_to_json(p.position)},
             {"clearance", p.clearance}};
      if (p.room) {
        j["room"] = p.room->value();
      }
      return j;
    }
    Json operator()(const StructureAttr& s) const {
      return Json{{"kind", "structure"},
                  {"pose", pose_to_json(s.pose)},
                  {"aabb", aabb_to_json(s.aabb)},
                  {"class", s.cls}};
    }
    Json operator()(const RoomAttr& r) const {
      return Json{{"kind", "room"},
                  {"pose", pose_to_json(r.pose)},
                  {"aabb", aabb_to_json(r.aabb)},
                  {"class", r.cls}};
    }
    Json operator()(const BuildingAttr& b) const {
      return Json{{"kind", "building"},
                  {"pose", pose_to_json(b.pose)},
                  {"aabb", aabb_to_json(b.aabb)},
                  {"class", b.cls}};
    }
  };
  return std::visit(Visitor{}, attrs);
}

NodeAttributes attrs_from_json(const Json& j) {
  const auto kind = require(j, "kind").get<std::string>();
  if (kind == "object") {
    ObjectAttr o;
    o.pose = pose_from_json(require(j, "pose"));
    o.aabb = aabb_from_json(require(j, "aabb"));
    o.cls = require(j, "class").get<ClassId>();
    if (auto it = j.find("known_shape"); it != j.end()) {
      o.known_shape = it->get<std::string>();
    }
    return o;
  }
  if (kind == "agent") {
    AgentAttr a;
    a.cls = require(j, "class").get<std::string>() == "robot" ? AgentClass::kRobot
                                                               : AgentClass::kHuman;
    a.track = track_from_json(require(j, "track"));
    return a;
  }
  if (kind == "place") {
    PlaceAttr p;
    p.position = vec3_from_json(require(j, "position"));
    p.clearance = require(j, "clearance").get<double>();
    if (auto it = j.find("room"); it != j.end()) {
      p.room = NodeId::from_raw(it->get<std::uint64_t>());
    }
    return p;
  }
  if (kind == "structure") {
    StructureAttr s;
    s.pose = pose_from_json(require(j, "pose"));
    s.aabb = aabb_from_json(require(j, "aabb"));
    s.cls = require(j, "class").get<ClassId>();
    return s;
  }
  if (kind == "room") {
    RoomAttr r;
    r.pose = pose_from_json(require(j, "pose"));
    r.aabb = aabb_from_json(require(j, "aabb"));
    r.cls = require(j, "class").get<ClassId>();
    return r;
  }
  if (kind == "building") {
    BuildingAttr b;
    b.pose = pose_from_json(require(j, "pose"));
    b.aabb = aabb_from_json(require(j, "aabb"));
    b.cls = require(j, "class").get<ClassId>();
    return b;
  }
  throw ParseError("unknown node kind '" + kind + "'");
}

}  // namespace

Json graph_to_json(const SceneGraph& graph) {
  Json nodes = Json::array();
  for (const auto& [id, node] : graph.nodes()) {
    nodes.push_back({{"id", id.value()},
                     {"layer", static_cast<int>(id.layer())},
                     {"attrs", attrs_to_json(node.attrs)}});
  }
  Json edges = Json::array();
  for (const auto& [eid, e] : graph.edges()) {
    Json je{{"src", e.src.value()}, {"dst", e.dst.value()}, {"relation", relation_name(e.relation)}};
    if (e.t) {
      je["t"] = *e.t;
    }
    edges.push_back(std::move(je));
  }
  const Mesh& mesh = graph.mesh();
  Json vertices = Json::array();
  Json normals = Json::array();
  Json colors = Json::array();
  Json labels = Json::array();
  for (const auto& v : mesh.vertices) {
    vertices.push_back(vec3_to_json(v.position));
    normals.push_back(vec3_to_json(v.normal));
    colors.push_back({v.color[0], v.color[1], v.color[2]});
    labels.push_back(v.label);
  }
  Json faces = Json::array();
  for (const auto& f : mesh.faces) {
    faces.push_back({f[0], f[1], f[2]});
  }
  return Json{{"version", kGraphFormatVersion},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)},
              {"mesh",
               {{"vertices", std::move(vertices)},
                {"normals", std::move(normals)},
                {"colors", std::move(colors)},
                {"labels", std::move(labels)},
                {"faces", std::move(faces)}}}};
}

SceneGraph graph_from_json(const Json& doc) {
  try {
    const int version = require(doc, "version").get<int>();
    if (version != kGraphFormatVersion) {
      throw ParseError("unsupported graph format version " + std::to_string(version));
    }
    SceneGraph graph;
    const Json& mesh = require(doc, "mesh");
    const Json& vertices = require(mesh, "vertices");
    const Json& labels = require(mesh, "labels");
    const auto normals = mesh.find("normals");
    const auto colors = mesh.find("colors");
    if (labels.size() != vertices.size()) {
      throw ParseError("mesh labels and vertices differ in length");
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      MeshVertexAttr v;
      v.position = vec3_from_json(vertices[i]);
      v.label = labels[i].get<ClassId>();
      if (normals != mesh.end()) {
        v.normal = vec3_from_json(normals->at(i));
      }
      if (colors != mesh.end()) {
        const auto& c = colors->at(i);
        v.color = {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(),
                   c.at(2).get<std::uint8_t>()};
      }
      graph.add_node(v);
    }
    for (const auto& f : require(mesh, "faces")) {
      graph.add_face(f.at(0).get<std::uint32_t>(), f.at(1).get<std::uint32_t>(),
                     f.at(2).get<std::uint32_t>());
    }
    for (const auto& jn : require(doc, "nodes")) {
      const NodeId id = NodeId::from_raw(require(jn, "id").get<std::uint64_t>());
      if (static_cast<int>(id.layer()) != require(jn, "layer").get<int>()) {
        throw ParseError("node layer tag disagrees with its id");
      }
      graph.insert_node(id, attrs_from_json(require(jn, "attrs")));
    }
    for (const auto& je : require(doc, "edges")) {
      const auto rel = relation_from_name(require(je, "relation").get<std::string>());
      if (!rel) {
        throw ParseError("unknown relation");
      }
      std::optional<double> t;
      if (auto it = je.find("t"); it != je.end()) {
        t = it->get<double>();
      }
      graph.add_edge(NodeId::from_raw(require(je, "src").get<std::uint64_t>()),
                     NodeId::from_raw(require(je, "dst").get<std::uint64_t>()), *rel, t);
    }
    return graph;
  } catch (const ParseError&) {
    throw;
  } catch (const GraphError& e) {
    throw ParseError(std::string("inconsistent graph: ") + e.what());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed graph document: ") + e.what());
  }
}

std::string serialize(const SceneGraph& graph) { return graph_to_json(graph).dump(); }

SceneGraph deserialize(std::string_view bytes) {
  Json doc;
  try {
    doc = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("graph parse error: ") + e.what());
  }
  return graph_from_json(doc);
}

}  // namespace dsg
