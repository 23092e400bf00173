#include "dsg/pipeline.hpp"

#include "dsg/point_index.hpp"
#include "dsg/surface.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace dsg {

Json config_to_json(const PipelineConfig& c) {
  const auto& g = c.tracker.gate;
  return {
      {"voxel_size", c.voxel_size},
      {"truncation", c.truncation},
      {"esdf_max_distance", c.esdf_max_distance},
      {"masking", c.masking},
      {"masking_ablation", c.masking_ablation},
      {"reference_spacing", c.reference_spacing},
      {"sensor",
       {{"azimuth_bins", c.sensor.azimuth_bins},
        {"elevation_bins", c.sensor.elevation_bins},
        {"max_range", c.sensor.max_range},
        {"depth_sigma", c.sensor.depth_sigma},
        {"label_flip", c.sensor.label_flip},
        {"jitter", c.sensor.jitter}}},
      {"cluster_threshold", c.cluster_threshold},
      {"min_object_points", c.min_object_points},
      {"registration_beta", c.registration_beta},
      {"harris",
       {{"radius", c.harris.radius},
        {"threshold", c.harris.threshold},
        {"normal_neighbors", c.harris.normal_neighbors}}},
      {"structure_threshold", c.structure_threshold},
      {"places",
       {{"min_clearance", c.places.min_clearance},
        {"spacing", c.places.spacing},
        {"edge_radius", c.places.edge_radius}}},
      {"section_offset", c.section_offset},
      {"room_cutoff", c.room_cutoff},
      {"room_min_cells", c.room_min_cells},
      {"noise",
       {{"torso_sigma", c.noise.torso_sigma},
        {"joint_sigma", c.noise.joint_sigma},
        {"outlier_probability", c.noise.outlier_probability},
        {"occlusion_boost", c.noise.occlusion_boost},
        {"outlier_radius", c.noise.outlier_radius},
        {"filterable_fraction", c.noise.filterable_fraction}}},
      {"detection_seed", c.detection_seed},
      {"tracker",
       {{"max_joint_disp", g.max_joint_disp},
        {"interval", g.interval},
        {"min_dt", g.min_dt},
        {"min_bbox", g.min_bbox},
        {"border_margin", g.border_margin},
        {"prior_weight", c.tracker.prior_weight},
        {"motion_weight", c.tracker.motion_weight},
        {"max_gap", c.tracker.max_gap},
        {"max_iterations", c.tracker.optimizer.max_iterations},
        {"update_tolerance", c.tracker.optimizer.update_tolerance}}},
      {"min_track_states", c.min_track_states},
  };
}

namespace {

void check_keys(const Json& base, const Json& overrides, const std::string& prefix) {
  if (!overrides.is_object()) {
    throw ParseError("config" + (prefix.empty() ? "" : " '" + prefix + "'") +
                     " must be an object");
  }
  for (const auto& [key, value] : overrides.items()) {
    const auto it = base.find(key);
    if (it == base.end()) {
      throw ParseError("unknown config key '" + prefix + key + "'");
    }
    if (it->is_object()) {
      check_keys(*it, value, prefix + key + ".");
    } else if (it->is_boolean() != value.is_boolean() || it->is_number() != value.is_number()) {
      throw ParseError("config key '" + prefix + key + "' has the wrong type");
    }
  }
}

}  // namespace

PipelineConfig config_from_json(const Json& overrides) {
  Json j = config_to_json(PipelineConfig{});
  if (!overrides.is_null()) {
    check_keys(j, overrides, "");
    j.merge_patch(overrides);
  }
  try {
    PipelineConfig c;
    c.voxel_size = j["voxel_size"];
    c.truncation = j["truncation"];
    c.esdf_max_distance = j["esdf_max_distance"];
    c.masking = j["masking"];
    c.masking_ablation = j["masking_ablation"];
    c.reference_spacing = j["reference_spacing"];
    const auto& s = j["sensor"];
    c.sensor.azimuth_bins = s["azimuth_bins"];
    c.sensor.elevation_bins = s["elevation_bins"];
    c.sensor.max_range = s["max_range"];
    c.sensor.depth_sigma = s["depth_sigma"];
    c.sensor.label_flip = s["label_flip"];
    c.sensor.jitter = s["jitter"];
    c.cluster_threshold = j["cluster_threshold"];
    c.min_object_points = j["min_object_points"];
    c.registration_beta = j["registration_beta"];
    c.harris.radius = j["harris"]["radius"];
    c.harris.threshold = j["harris"]["threshold"];
    c.harris.normal_neighbors = j["harris"]["normal_neighbors"];
    c.structure_threshold = j["structure_threshold"];
    c.places.min_clearance = j["places"]["min_clearance"];
    c.places.spacing = j["places"]["spacing"];
    c.places.edge_radius = j["places"]["edge_radius"];
    c.section_offset = j["section_offset"];
    c.room_cutoff = j["room_cutoff"];
    c.room_min_cells = j["room_min_cells"];
    const auto& n = j["noise"];
    c.noise.torso_sigma = n["torso_sigma"];
    c.noise.joint_sigma = n["joint_sigma"];
    c.noise.outlier_probability = n["outlier_probability"];
    c.noise.occlusion_boost = n["occlusion_boost"];
    c.noise.outlier_radius = n["outlier_radius"];
    c.noise.filterable_fraction = n["filterable_fraction"];
    c.detection_seed = j["detection_seed"];
    const auto& t = j["tracker"];
    c.tracker.gate.max_joint_disp = t["max_joint_disp"];
    c.tracker.gate.interval = t["interval"];
    c.tracker.gate.min_dt = t["min_dt"];
    c.tracker.gate.min_bbox = t["min_bbox"];
    c.tracker.gate.border_margin = t["border_margin"];
    c.tracker.prior_weight = t["prior_weight"];
    c.tracker.motion_weight = t["motion_weight"];
    c.tracker.max_gap = t["max_gap"];
    c.tracker.optimizer.max_iterations = t["max_iterations"];
    c.tracker.optimizer.update_tolerance = t["update_tolerance"];
    c.min_track_states = j["min_track_states"];
    if (!(c.voxel_size > 0.0) || !(c.truncation > 0.0) || !(c.places.spacing > 0.0)) {
      throw ParseError("voxel_size, truncation and places.spacing must be positive");
    }
    return c;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

TsdfLayer fuse_scans(const WorldSpec& world, std::span<const Scan> scans, double voxel_size,
                     double truncation, bool masking) {
  const Aabb b = world.bounds();
  TsdfLayer tsdf(VoxelGrid::covering(b.min, b.max, voxel_size), truncation);
  for (const auto& scan : scans) {
    if (masking) {
      integrate_scan(tsdf, scan);
    } else {
      Scan copy = scan;
      for (auto& r : copy.rays) {
        r.dynamic_mask = false;
      }
      integrate_scan(tsdf, copy);
    }
  }
  return tsdf;
}

RoomSegmentation segment_places_and_rooms(const EsdfGrid& esdf, const Mesh& mesh,
                                          const PipelineConfig& cfg) {
  RoomSegmentation out;
  out.places = extract_places(esdf, cfg.places);
  out.ceiling = detect_ceiling(mesh);
  out.section = esdf_section(esdf, out.ceiling - cfg.section_offset);
  out.partition = segment_rooms(out.section, cfg.room_cutoff, cfg.room_min_cells);
  out.labels = label_places(out.places, out.section, out.partition);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
auto stage(const char* name, Json& runtimes, F&& f) {
  const auto start = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      runtimes[name] = std::chrono::duration<double>(Clock::now() - start).count();
    } else {
      auto r = f();
      runtimes[name] = std::chrono::duration<double>(Clock::now() - start).count();
      return r;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

double mean_or_null(const std::vector<double>& v) {
  if (v.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

PipelineResult run_pipeline(const WorldSpec& world, const PipelineConfig& cfg) {
  PipelineResult result;
  SceneGraph& graph = result.graph;
  Json runtimes = Json::object();
  Json report;
  report["seed"] = world.seed;
  report["config"] = config_to_json(cfg);
  const auto total_start = Clock::now();

  const auto scans = stage("render", runtimes, [&] { return render_scans(world, cfg.sensor); });
  const auto tsdf = stage("integrate", runtimes, [&] {
    return fuse_scans(world, scans, cfg.voxel_size, cfg.truncation, cfg.masking);
  });
  const auto mesh = stage("surface", runtimes, [&] { return extract_surface(tsdf); });

  stage("mesh_error", runtimes, [&] {
    const auto reference = sample_world_surface(world, cfg.reference_spacing);
    const auto est = vertex_positions(mesh);
    Json m{{"vertices", mesh.vertices.size()}, {"faces", mesh.faces.size()}};
    const double rmse = mesh_error(est, reference);
    m[cfg.masking ? "rmse_masked" : "rmse_unmasked"] = rmse;
    if (cfg.masking_ablation) {
      const auto other = fuse_scans(world, scans, cfg.voxel_size, cfg.truncation, !cfg.masking);
      const auto other_mesh = extract_surface(other);
      m[cfg.masking ? "rmse_unmasked" : "rmse_masked"] =
          mesh_error(vertex_positions(other_mesh), reference);
    }
    report["mesh"] = std::move(m);
  });

  stage("mesh_layer", runtimes, [&] {
    for (const auto& v : mesh.vertices) {
      graph.add_node(v);
    }
    for (const auto& f : mesh.faces) {
      graph.add_face(f[0], f[1], f[2]);
    }
  });

  const auto esdf = stage("esdf", runtimes,
                          [&] { return compute_esdf(tsdf, cfg.esdf_max_distance); });

  // objects
  std::vector<NodeId> object_ids;
  stage("objects", runtimes, [&] {
    const auto clusters = segment_objects(mesh, cfg.cluster_threshold, cfg.min_object_points);
    for (const auto& cluster : clusters) {
      ShapeFit best;
      best.object = fit_centroid_aabb(cluster);
      for (const auto& cad : world.cad) {
        if (cad.model.cls != cluster.cls) {
          continue;
        }
        auto fit = fit_known_shape(cad.model, cluster, cfg.registration_beta, cfg.harris);
        if (fit.known) {
          best = std::move(fit);
          break;
        }
      }
      const NodeId id = graph.add_node(Layer::kObjectsAgents, best.object);
      for (const auto v : cluster.vertices) {
        graph.add_edge(id, NodeId(Layer::kMesh, v), Relation::kObjectContainsVertices);
      }
      object_ids.push_back(id);
    }
  });

  stage("structures", runtimes, [&] {
    for (const auto& s : extract_structures(mesh, cfg.structure_threshold)) {
      graph.add_node(Layer::kPlacesStructures, s);
    }
  });

  result.rooms = stage("places_rooms", runtimes,
                       [&] { return segment_places_and_rooms(esdf, mesh, cfg); });
  const auto& seg = result.rooms;
  const auto& labels = seg.labels.labels;

  // scene graph layers 3-5 over the labeled places only
  std::vector<NodeId> place_node(seg.places.nodes.size());
  std::vector<std::size_t> kept;
  stage("rooms_layer", runtimes, [&] {
    PlaceGraph sub;
    std::vector<std::uint32_t> sub_labels;
    std::vector<std::int64_t> remap(seg.places.nodes.size(), -1);
    for (std::size_t i = 0; i < seg.places.nodes.size(); ++i) {
      if (labels[i] == 0) {
        continue;
      }
      const auto& p = seg.places.nodes[i];
      remap[i] = static_cast<std::int64_t>(sub.nodes.size());
      sub.nodes.push_back(p);
      sub_labels.push_back(labels[i]);
      place_node[i] = graph.add_node(Layer::kPlacesStructures,
                                     PlaceAttr{p.position, p.clearance, std::nullopt});
      kept.push_back(i);
    }
    for (const auto& [a, b] : seg.places.edges) {
      if (remap[a] >= 0 && remap[b] >= 0) {
        sub.edges.emplace_back(remap[a], remap[b]);
        graph.add_edge(place_node[a], place_node[b], Relation::kTraversable);
      }
    }
    std::vector<NodeId> sub_ids;
    for (const auto i : kept) {
      sub_ids.push_back(place_node[i]);
    }
    build_rooms_layer(graph, sub, sub_ids, sub_labels, seg.partition.count);
  });

  std::vector<Vec3> kept_positions;
  for (const auto i : kept) {
    kept_positions.push_back(seg.places.nodes[i].position);
  }
  const PointIndex place_index(kept_positions, 1.0);
  auto nearest_kept = [&](const Vec3& p) -> std::optional<NodeId> {
    const auto n = place_index.nearest(p);
    if (!n) {
      return std::nullopt;
    }
    return place_node[kept[*n]];
  };

  stage("object_places", runtimes, [&] {
    for (const NodeId id : object_ids) {
      const Vec3 c = graph.get<ObjectAttr>(id).aabb.center();
      std::optional<NodeId> target;
      if (const auto cell = seg.section.cell_of(c.x(), c.y())) {
        const std::uint32_t room = seg.partition.at(cell->first, cell->second);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < kept.size() && room != 0; ++k) {
          if (labels[kept[k]] != room) {
            continue;
          }
          const double d = (kept_positions[k] - c).squaredNorm();
          if (d < best) {
            best = d;
            target = place_node[kept[k]];
          }
        }
      }
      if (!target) {
        target = nearest_kept(c);
      }
      if (!target) {
        throw std::runtime_error("no place to attach objects to");
      }
      graph.add_edge(id, *target, Relation::kProximal);
    }
  });

  const auto tracking = stage("tracking", runtimes, [&] {
    const auto detections = simulate_detections(world, cfg.noise, cfg.detection_seed);
    return tracking_ablation(world, detections, cfg.tracker, cfg.min_track_states);
  });

  stage("agents", runtimes, [&] {
    std::uint64_t max_id = 0;
    auto add_agent = [&](const AgentTrack& track) {
      const NodeId id = graph.add_node(Layer::kObjectsAgents, AgentAttr{track.cls, track});
      for (const auto& s : track.states) {
        if (const auto place = nearest_kept(s.pose.translation)) {
          graph.add_edge(id, *place, Relation::kAgentAtPlace, s.t);
        }
      }
    };
    for (const auto& track : tracking.tracks) {
      max_id = std::max(max_id, track.id);
      if (track.states.size() >= cfg.min_track_states) {
        add_agent(track);
      }
    }
    if (!world.robot.empty()) {
      add_agent(track_from_trajectory(max_id + 1, AgentClass::kRobot, world.robot));
    }
    refresh_room_boxes(graph);
  });

  const auto validation = stage("validate", runtimes, [&] { return validate(graph); });

  // report
  {
    std::vector<Vec3> positions;
    for (const auto& p : seg.places.nodes) {
      positions.push_back(p.position);
    }
    Json rooms{{"detected", seg.partition.count},
               {"truth", world.rooms.size()},
               {"ceiling", seg.ceiling},
               {"places", seg.places.nodes.size()},
               {"place_edges", seg.places.edges.size()},
               {"unlabeled", seg.labels.unlabeled},
               {"label_passes", seg.labels.passes}};
    try {
      const auto score = room_metrics(positions, labels, world);
      const auto [wrong, near] = errors_near_doors(positions, labels, world, score);
      rooms["precision"] = score.precision;
      rooms["recall"] = score.recall;
      rooms["misclassified"] = wrong;
      rooms["misclassified_near_doors"] = near;
    } catch (const std::invalid_argument&) {
      rooms["precision"] = nullptr;
      rooms["recall"] = nullptr;
    }
    report["rooms"] = std::move(rooms);

    std::vector<double> known;
    std::vector<double> unknown;
    Json objects = Json::array();
    for (const auto& e : object_errors(graph, world)) {
      (e.known ? known : unknown).push_back(e.error);
      objects.push_back({{"node", e.node.value()},
                         {"class", class_name(e.cls)},
                         {"truth", e.truth},
                         {"known_shape", e.known},
                         {"centroid_error", e.error}});
    }
    report["objects"] = {{"detected", object_ids.size()},
                         {"truth", world.objects.size()},
                         {"known_shape", known.size()},
                         {"mean_error_known", number(mean_or_null(known))},
                         {"mean_error_unknown", number(mean_or_null(unknown))},
                         {"items", std::move(objects)}};

    Json agents = Json::array();
    for (const auto& a : tracking.agents) {
      Json ja{{"agent", a.agent},
              {"detections", a.detections},
              {"outliers", a.outliers},
              {"raw", number(a.raw)},
              {"filtered", number(a.filtered)},
              {"smoothed", number(a.smoothed)},
              {"tracked", a.tracked}};
      ja["track"] = a.track ? Json(*a.track) : Json(nullptr);
      agents.push_back(std::move(ja));
    }
    report["tracking"] = {{"tracks", tracking.tracks.size()}, {"agents", std::move(agents)}};

    Json violations = Json::array();
    for (const auto& v : validation.violations) {
      violations.push_back({{"code", v.code}, {"node", v.node.value()}, {"message", v.message}});
    }
    report["validation"] = {{"ok", validation.ok()}, {"violations", std::move(violations)}};
    report["graph"] = {{"nodes", graph.num_nodes()},
                       {"edges", graph.num_edges()},
                       {"mesh_vertices", graph.mesh().vertices.size()}};
  }
  runtimes["total"] = std::chrono::duration<double>(Clock::now() - total_start).count();
  report["runtimes"] = std::move(runtimes);
  result.report = std::move(report);
  return result;
}

}  // namespace dsg
