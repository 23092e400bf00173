// dsg: generate synthetic worlds, build scene graphs from them and query
// the result.

#include "dsg/graph_io.hpp"
#include "dsg/pipeline.hpp"
#include "dsg/query.hpp"
#include "dsg/tracking_io.hpp"
#include "dsg/world.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;

dsg::Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw dsg::ParseError("cannot open " + path);
  }
  try {
    return dsg::Json::parse(in);
  } catch (const dsg::Json::exception& e) {
    throw dsg::ParseError(path + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw dsg::ParseError("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << text;
}

// --- gen ---------------------------------------------------------------------

int run_gen(std::uint64_t seed, const dsg::WorldConfig& cfg, const std::string& out) {
  const auto world = dsg::generate_world(seed, cfg);
  dsg::save_world(out, world);
  const auto sims = dsg::simulate_detections(world, dsg::NoiseModel{}, seed);
  std::vector<dsg::Detection> dets;
  for (const auto& s : sims) {
    dets.push_back(s.detection);
  }
  std::ofstream stream(std::filesystem::path(out) / "detections.jsonl");
  dsg::write_detections(stream, dets);
  std::cout << "rooms " << world.rooms.size() << ", doors " << world.doors.size()
            << ", objects " << world.objects.size() << ", agents " << world.agents.size()
            << ", frames " << world.robot.size() << "\n";
  return 0;
}

// --- spin --------------------------------------------------------------------

int run_spin(const std::string& world_dir, const std::string& config, const std::string& out,
             const std::string& report_path) {
  dsg::WorldSpec world;
  dsg::PipelineConfig cfg;
  try {
    world = dsg::load_world(world_dir);
    cfg = config.empty() ? dsg::PipelineConfig{} : dsg::config_from_json(read_json(config));
  } catch (const std::exception& e) {
    std::cerr << "load: " << e.what() << "\n";
    return kExitStage;
  }
  dsg::PipelineResult result;
  try {
    result = dsg::run_pipeline(world, cfg);
  } catch (const dsg::StageError& e) {
    std::cerr << e.what() << "\n";
    return kExitStage;
  }
  if (!out.empty()) {
    write_text(out, dsg::serialize(result.graph));
  }
  if (!report_path.empty()) {
    write_text(report_path, result.report.dump(2) + "\n");
  }
  const auto& v = result.report["validation"];
  if (!v["ok"].get<bool>()) {
    std::cerr << "validation: " << v["violations"].size() << " violation(s)\n";
    return kExitValidation;
  }
  return 0;
}

// --- eval --------------------------------------------------------------------

std::string fmt(const dsg::Json& v) {
  if (v.is_null()) {
    return "-";
  }
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v.get<double>();
  return ss.str();
}

int run_eval(const std::string& path) {
  const auto r = read_json(path);
  const auto& mesh = r["mesh"];
  std::cout << "mesh      vertices " << mesh["vertices"] << "  rmse masked "
            << fmt(mesh.value("rmse_masked", dsg::Json())) << "  unmasked "
            << fmt(mesh.value("rmse_unmasked", dsg::Json())) << "\n";
  const auto& rooms = r["rooms"];
  std::cout << "rooms     detected " << rooms["detected"] << " / " << rooms["truth"]
            << "  precision " << fmt(rooms["precision"]) << "  recall " << fmt(rooms["recall"])
            << "\n";
  const auto& obj = r["objects"];
  std::cout << "objects   detected " << obj["detected"] << " / " << obj["truth"] << "  known "
            << obj["known_shape"] << "  centroid err known " << fmt(obj["mean_error_known"])
            << "  unknown " << fmt(obj["mean_error_unknown"]) << "\n";
  for (const auto& a : r["tracking"]["agents"]) {
    std::cout << "agent " << std::setw(3) << a["agent"].get<std::uint64_t>() << "  raw "
              << fmt(a["raw"]) << "  filtered " << fmt(a["filtered"]) << "  smoothed "
              << fmt(a["smoothed"]) << "\n";
  }
  std::cout << "runtime   " << fmt(r["runtimes"]["total"]) << " s\n";
  const bool ok = r["validation"]["ok"].get<bool>();
  std::cout << "validate  " << (ok ? "ok" : "FAILED") << "\n";
  return ok ? 0 : kExitValidation;
}

// --- query -------------------------------------------------------------------

dsg::NodeId node_arg(const dsg::Json& j, const char* key) {
  return dsg::NodeId::from_raw(dsg::require(j, key).get<std::uint64_t>());
}

dsg::Json ids(const std::vector<dsg::NodeId>& v) {
  dsg::Json out = dsg::Json::array();
  for (const auto id : v) {
    out.push_back(id.value());
  }
  return out;
}

dsg::Json path_json(const dsg::PathResult& p) {
  return {{"places", ids(p.places)}, {"length", p.length}};
}

dsg::Json answer(dsg::SceneGraph& graph, const dsg::Json& q) {
  const auto op = dsg::require(q, "op").get<std::string>();
  if (op == "path") {
    const auto p = dsg::plan_path(graph, node_arg(q, "from"), node_arg(q, "to"));
    return p ? path_json(*p) : dsg::Json{{"places", nullptr}};
  }
  if (op == "collision") {
    const auto bvh = dsg::build_bvh(graph);
    if (q.contains("segment")) {
      const auto& s = q["segment"];
      return {{"hits", ids(bvh.query(dsg::vec3_from_json(s.at(0)), dsg::vec3_from_json(s.at(1))))}};
    }
    return {{"hits", ids(bvh.query(dsg::aabb_from_json(dsg::require(q, "box"))))}};
  }
  if (op == "agent_at") {
    const auto s = dsg::agent_at_time(graph, node_arg(q, "agent"), dsg::require(q, "t").get<double>());
    dsg::Json out{{"pose", dsg::pose_to_json(s.pose)}};
    out["place"] = s.place ? dsg::Json(s.place->value()) : dsg::Json(nullptr);
    out["room"] = s.room ? dsg::Json(s.room->value()) : dsg::Json(nullptr);
    return out;
  }
  if (op == "find_object") {
    std::variant<dsg::NodeId, dsg::ClassId> target;
    if (q.contains("object")) {
      target = node_arg(q, "object");
    } else {
      const auto name = dsg::require(q, "class").get<std::string>();
      const auto cls = dsg::class_from_name(name);
      if (!cls) {
        throw dsg::QueryError("unknown class '" + name + "'");
      }
      target = *cls;
    }
    const auto r = dsg::plan_to_object(graph, target, node_arg(q, "from"));
    return {{"object", r.object.value()}, {"path", path_json(r.path)}};
  }
  if (op == "prune") {
    return {{"removed", ids(dsg::prune_branch(graph, node_arg(q, "node")))}};
  }
  throw dsg::QueryError("unknown op '" + op + "'");
}

int run_query(const std::string& graph_path, const std::string& out) {
  auto graph = dsg::deserialize(read_text(graph_path));
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    dsg::Json response;
    try {
      response = answer(graph, dsg::Json::parse(line));
    } catch (const std::exception& e) {
      response = {{"error", e.what()}};
    }
    std::cout << response.dump() << "\n";
  }
  if (!out.empty()) {
    write_text(out, dsg::serialize(graph));
  }
  return dsg::validate(graph).ok() ? 0 : kExitValidation;
}

// --- export ------------------------------------------------------------------

void write_obj(const dsg::SceneGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << std::setprecision(9);
  for (const auto& v : graph.mesh().vertices) {
    out << "v " << v.position.x() << ' ' << v.position.y() << ' ' << v.position.z() << ' '
        << v.color[0] / 255.0 << ' ' << v.color[1] / 255.0 << ' ' << v.color[2] / 255.0 << "\n";
  }
  for (const auto& f : graph.mesh().faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << "\n";
  }
}

// Top-down room map: each cell takes the gray level of the room of the
// nearest place within `radius`.
void write_room_pgm(const dsg::SceneGraph& graph, const std::string& path, double cell) {
  const auto rooms = graph.nodes_of<dsg::RoomAttr>();
  const auto places = graph.nodes_of<dsg::PlaceAttr>();
  dsg::Aabb box;
  for (const auto p : places) {
    box.extend(graph.get<dsg::PlaceAttr>(p).position);
  }
  if (box.empty()) {
    throw std::runtime_error("graph has no places");
  }
  box = box.inflated(1.0);
  const int nx = static_cast<int>(std::ceil(box.extent().x() / cell));
  const int ny = static_cast<int>(std::ceil(box.extent().y() / cell));
  std::vector<std::uint8_t> image(static_cast<std::size_t>(nx) * ny, 0);
  constexpr double kRadius = 0.5;
  for (const auto p : places) {
    const auto& attr = graph.get<dsg::PlaceAttr>(p);
    if (!attr.room) {
      continue;
    }
    const auto rank = std::find(rooms.begin(), rooms.end(), *attr.room) - rooms.begin();
    const auto level = static_cast<std::uint8_t>(40 + (rank * 53) % 215);
    const int cx = static_cast<int>((attr.position.x() - box.min.x()) / cell);
    const int cy = static_cast<int>((attr.position.y() - box.min.y()) / cell);
    const int r = static_cast<int>(kRadius / cell);
    for (int y = std::max(0, cy - r); y <= std::min(ny - 1, cy + r); ++y) {
      for (int x = std::max(0, cx - r); x <= std::min(nx - 1, cx + r); ++x) {
        image[static_cast<std::size_t>(ny - 1 - y) * nx + x] = level;
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  out << "P5\n" << nx << ' ' << ny << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
}

int run_export(const std::string& graph_path, const std::string& format, const std::string& out) {
  const auto graph = dsg::deserialize(read_text(graph_path));
  if (format == "json") {
    write_text(out, dsg::graph_to_json(graph).dump(2) + "\n");
  } else if (format == "obj") {
    write_obj(graph, out);
  } else {
    write_room_pgm(graph, out, 0.05);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D dynamic scene graphs from synthetic sensor streams"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a synthetic world");
  std::uint64_t seed = 1;
  dsg::WorldConfig wcfg;
  std::vector<double> extent{wcfg.extent_x, wcfg.extent_y};
  std::string out;
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--rooms", wcfg.rooms, "number of rooms");
  gen->add_option("--extent", extent, "building size in meters (x [y])")->expected(1, 2);
  gen->add_option("--agents", wcfg.agents, "number of humans");
  gen->add_option("--duration", wcfg.duration, "run length in seconds (<= 0: one tour)");
  gen->add_option("--rate", wcfg.rate, "scan rate in Hz");
  gen->add_option("--out", out, "output directory")->required();

  auto* spin = app.add_subcommand("spin", "build a scene graph from a world");
  std::string world_dir;
  std::string config;
  std::string report;
  spin->add_option("--world", world_dir, "world directory")->required();
  spin->add_option("--config", config, "JSON config overrides");
  spin->add_option("--out", out, "scene graph output (JSON)");
  spin->add_option("--report", report, "metrics report output (JSON)");

  auto* eval = app.add_subcommand("eval", "summarize a metrics report");
  eval->add_option("--report", report, "report file")->required();

  auto* query = app.add_subcommand("query", "answer JSON-lines queries from stdin");
  std::string graph_path;
  query->add_option("--graph", graph_path, "scene graph file")->required();
  query->add_option("--out", out, "write the graph after the queries (prune)");

  auto* exp = app.add_subcommand("export", "export a scene graph");
  std::string format = "json";
  exp->add_option("--graph", graph_path, "scene graph file")->required();
  exp->add_option("--format", format, "json, pgm or obj")
      ->check(CLI::IsMember({"json", "pgm", "obj"}));
  exp->add_option("--out", out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      wcfg.extent_x = extent.front();
      wcfg.extent_y = extent.back();
      return run_gen(seed, wcfg, out);
    }
    if (*spin) {
      return run_spin(world_dir, config, out, report);
    }
    if (*eval) {
      return run_eval(report);
    }
    if (*query) {
      return run_query(graph_path, out);
    }
    return run_export(graph_path, format, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
