#include "dsg/world.hpp"

#include <fstream>

namespace dsg {

namespace {

Json rect_to_json(const Rect& r) { return Json::array({r.x0, r.y0, r.x1, r.y1}); }

Rect rect_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError("expected rect [x0, y0, x1, y1]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Json states_to_json(const std::vector<TrackState>& states) {
  Json out = Json::array();
  for (const auto& s : states) {
    Json js = pose_to_json(s.pose);
    js["t"] = s.t;
    out.push_back(std::move(js));
  }
  return out;
}

std::vector<TrackState> states_from_json(const Json& j) {
  std::vector<TrackState> out;
  for (const auto& js : j) {
    out.push_back({require(js, "t").get<double>(), pose_from_json(js)});
  }
  return out;
}

ClassId class_of(const Json& j) {
  const auto name = j.get<std::string>();
  const auto cls = class_from_name(name);
  if (!cls) {
    throw ParseError("unknown class '" + name + "'");
  }
  return *cls;
}

}  // namespace

Json world_to_json(const WorldSpec& world) {
  Json j;
  j["seed"] = world.seed;
  j["extent"] = rect_to_json(world.extent);
  j["ceiling_z"] = world.ceiling_z;
  j["wall_thickness"] = world.wall_thickness;
  j["slab_thickness"] = world.slab_thickness;
  j["duration"] = world.duration;
  j["rate"] = world.rate;
  j["rooms"] = Json::array();
  for (const auto& r : world.rooms) {
    j["rooms"].push_back({{"id", r.id}, {"rect", rect_to_json(r.rect)}});
  }
  j["doors"] = Json::array();
  for (const auto& d : world.doors) {
    j["doors"].push_back({{"rooms", {d.room_a, d.room_b}},
                          {"axis", d.axis},
                          {"wall", d.wall},
                          {"center", d.center},
                          {"width", d.width},
                          {"height", d.height}});
  }
  j["objects"] = Json::array();
  for (const auto& o : world.objects) {
    Json jo{{"id", o.id},
            {"class", class_name(o.cls)},
            {"pose", pose_to_json(o.pose)},
            {"extents", vec3_to_json(o.extents)},
            {"room", o.room}};
    if (o.cad_id) {
      jo["cad"] = *o.cad_id;
    }
    j["objects"].push_back(std::move(jo));
  }
  j["agents"] = Json::array();
  for (const auto& a : world.agents) {
    j["agents"].push_back({{"id", a.id},
                           {"class", agent_class_name(a.cls)},
                           {"trajectory", states_to_json(a.trajectory)}});
  }
  j["robot"] = states_to_json(world.robot);
  j["cad"] = Json::array();
  for (const auto& c : world.cad) {
    Json jc = cad_to_json(c.model);
    jc["parts"] = Json::array();
    for (const auto& p : c.parts) {
      jc["parts"].push_back(aabb_to_json(p));
    }
    j["cad"].push_back(std::move(jc));
  }
  return j;
}

WorldSpec world_from_json(const Json& j) {
  try {
    WorldSpec w;
    w.seed = require(j, "seed").get<std::uint64_t>();
    w.extent = rect_from_json(require(j, "extent"));
    w.ceiling_z = require(j, "ceiling_z").get<double>();
    w.wall_thickness = j.value("wall_thickness", w.wall_thickness);
    w.slab_thickness = j.value("slab_thickness", w.slab_thickness);
    w.duration = j.value("duration", w.duration);
    w.rate = j.value("rate", w.rate);
    for (const auto& jr : require(j, "rooms")) {
      w.rooms.push_back({require(jr, "id").get<std::uint32_t>(), rect_from_json(require(jr, "rect"))});
    }
    for (const auto& jd : require(j, "doors")) {
      DoorSpec d;
      const auto& rooms = require(jd, "rooms");
      d.room_a = rooms.at(0).get<std::uint32_t>();
      d.room_b = rooms.at(1).get<std::uint32_t>();
      d.axis = require(jd, "axis").get<int>();
      d.wall = require(jd, "wall").get<double>();
      d.center = require(jd, "center").get<double>();
      d.width = jd.value("width", d.width);
      d.height = jd.value("height", d.height);
      w.doors.push_back(d);
    }
    for (const auto& jo : require(j, "objects")) {
      ObjectSpec o;
      o.id = require(jo, "id").get<std::uint32_t>();
      o.cls = class_of(require(jo, "class"));
      o.pose = pose_from_json(require(jo, "pose"));
      o.extents = vec3_from_json(require(jo, "extents"));
      o.room = jo.value("room", 0U);
      if (jo.contains("cad")) {
        o.cad_id = jo["cad"].get<std::string>();
      }
      w.objects.push_back(std::move(o));
    }
    for (const auto& ja : require(j, "agents")) {
      AgentSpec a;
      a.id = require(ja, "id").get<std::uint64_t>();
      a.cls = require(ja, "class").get<std::string>() == "robot" ? AgentClass::kRobot
                                                                  : AgentClass::kHuman;
      a.trajectory = states_from_json(require(ja, "trajectory"));
      w.agents.push_back(std::move(a));
    }
    w.robot = states_from_json(require(j, "robot"));
    for (const auto& jc : j.value("cad", Json::array())) {
      CadShape c;
      c.model = cad_from_json(jc);
      for (const auto& jp : require(jc, "parts")) {
        c.parts.push_back(aabb_from_json(jp));
      }
      w.cad.push_back(std::move(c));
    }
    for (const auto& o : w.objects) {
      if (o.cad_id && w.find_cad(*o.cad_id) == nullptr) {
        throw ParseError("object " + std::to_string(o.id) + " references unknown CAD model '" +
                         *o.cad_id + "'");
      }
    }
    return w;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("world: ") + e.what());
  }
}

void save_world(const std::filesystem::path& dir, const WorldSpec& world) {
  std::filesystem::create_directories(dir / "cad");
  std::ofstream out(dir / "world.json");
  if (!out) {
    throw std::runtime_error("cannot write " + (dir / "world.json").string());
  }
  out << world_to_json(world).dump() << '\n';
  for (const auto& c : world.cad) {
    save_cad_model(dir / "cad" / (c.model.id + ".json"), c.model);
  }
}

WorldSpec load_world(const std::filesystem::path& dir) {
  const auto path = std::filesystem::is_directory(dir) ? dir / "world.json" : dir;
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return world_from_json(j);
}

}  // namespace dsg
