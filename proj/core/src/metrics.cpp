#include "dsg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace dsg {

RoomScore room_metrics(std::span<const std::uint32_t> predicted,
                       std::span<const std::uint32_t> truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("room_metrics: label count mismatch");
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> overlap;
  std::map<std::uint32_t, std::size_t> pred_size;
  std::map<std::uint32_t, std::size_t> truth_size;
  RoomScore score;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (truth[i] == 0) {
      continue;
    }
    ++score.places;
    ++truth_size[truth[i]];
    if (predicted[i] != 0) {
      ++pred_size[predicted[i]];
      ++overlap[{predicted[i], truth[i]}];
    }
  }
  if (pred_size.empty()) {
    throw std::invalid_argument("room_metrics: no labeled places");
  }
  std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::size_t>> order(
      overlap.begin(), overlap.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::map<std::uint32_t, std::uint32_t> pred_to_truth;
  std::set<std::uint32_t> used;
  for (const auto& [key, count] : order) {
    if (pred_to_truth.count(key.first) != 0 || used.count(key.second) != 0) {
      continue;
    }
    pred_to_truth[key.first] = key.second;
    used.insert(key.second);
    score.matches.push_back(key);
  }
  std::sort(score.matches.begin(), score.matches.end());
  double precision = 0.0;
  for (const auto& [p, n] : pred_size) {
    const auto it = pred_to_truth.find(p);
    if (it != pred_to_truth.end()) {
      precision += static_cast<double>(overlap[{p, it->second}]) / static_cast<double>(n);
    }
  }
  double recall = 0.0;
  for (const auto& [p, t] : pred_to_truth) {
    recall += static_cast<double>(overlap[{p, t}]) / static_cast<double>(truth_size[t]);
  }
  score.predicted_rooms = pred_size.size();
  score.truth_rooms = truth_size.size();
  score.precision = precision / static_cast<double>(pred_size.size());
  score.recall = recall / static_cast<double>(truth_size.size());
  return score;
}

namespace {

std::vector<std::uint32_t> truth_labels(std::span<const Vec3> positions, const WorldSpec& world) {
  std::vector<std::uint32_t> truth(positions.size(), 0);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t r = 0; r < world.rooms.size(); ++r) {
      if (world.rooms[r].rect.contains(positions[i].x(), positions[i].y())) {
        truth[i] = static_cast<std::uint32_t>(r + 1);
        break;
      }
    }
  }
  return truth;
}

}  // namespace

RoomScore room_metrics(std::span<const Vec3> positions, std::span<const std::uint32_t> predicted,
                       const WorldSpec& world) {
  if (positions.size() != predicted.size()) {
    throw std::invalid_argument("room_metrics: label count mismatch");
  }
  const auto truth = truth_labels(positions, world);
  return room_metrics(predicted, truth);
}

std::pair<std::size_t, std::size_t> errors_near_doors(std::span<const Vec3> positions,
                                                      std::span<const std::uint32_t> predicted,
                                                      const WorldSpec& world,
                                                      const RoomScore& score, double radius) {
  const auto truth = truth_labels(positions, world);
  std::map<std::uint32_t, std::uint32_t> pred_to_truth(score.matches.begin(), score.matches.end());
  std::size_t wrong = 0;
  std::size_t near = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (truth[i] == 0 || predicted[i] == 0) {
      continue;
    }
    const auto it = pred_to_truth.find(predicted[i]);
    if (it != pred_to_truth.end() && it->second == truth[i]) {
      continue;
    }
    ++wrong;
    for (const auto& d : world.doors) {
      const int along = 1 - d.axis;
      const double lo = d.center - d.width / 2;
      const double hi = d.center + d.width / 2;
      const double s = std::clamp(positions[i][along], lo, hi);
      const double dn = positions[i][d.axis] - d.wall;
      const double ds = positions[i][along] - s;
      if (dn * dn + ds * ds <= radius * radius) {
        ++near;
        break;
      }
    }
  }
  return {wrong, near};
}

namespace {

Vec3 gt_torso(const WorldSpec& world, std::uint64_t agent, double t) {
  for (const auto& a : world.agents) {
    if (a.id == agent) {
      return agent_pose(a, t).translation;
    }
  }
  throw std::invalid_argument("unknown agent " + std::to_string(agent));
}

}  // namespace

TrackingRun tracking_ablation(const WorldSpec& world,
                              std::span<const SimulatedDetection> detections,
                              const TrackerConfig& cfg, std::size_t min_track_states) {
  MultiAgentTracker tracker(cfg);
  struct Tally {
    double raw = 0.0;
    double filtered = 0.0;
    std::size_t n = 0;
    std::size_t n_filtered = 0;
    std::size_t outliers = 0;
    std::map<std::uint64_t, std::size_t> tracks;
  };
  std::map<std::uint64_t, Tally> tally;
  std::map<std::uint64_t, std::vector<std::uint64_t>> origin;  // track -> agent per state
  for (const auto& a : world.agents) {
    tally[a.id];
  }
  std::size_t begin = 0;
  while (begin < detections.size()) {
    std::size_t end = begin;
    while (end < detections.size() && detections[end].detection.t == detections[begin].detection.t) {
      ++end;
    }
    std::vector<Detection> frame;
    for (std::size_t i = begin; i < end; ++i) {
      frame.push_back(detections[i].detection);
    }
    const auto result = tracker.process_frame(frame);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& sim = detections[i];
      auto& t = tally[sim.agent];
      const double err =
          (sim.detection.torso.translation - gt_torso(world, sim.agent, sim.detection.t)).norm();
      t.raw += err;
      ++t.n;
      t.outliers += sim.outlier ? 1 : 0;
      if (result.verdicts[i - begin] == FilterVerdict::kAccept) {
        t.filtered += err;
        ++t.n_filtered;
      }
      if (result.track_of[i - begin]) {
        ++t.tracks[*result.track_of[i - begin]];
        origin[*result.track_of[i - begin]].push_back(sim.agent);
      }
    }
    begin = end;
  }
  tracker.optimize_all();

  TrackingRun run;
  run.tracks = tracker.tracks();
  std::map<std::uint64_t, std::pair<double, std::size_t>> smoothed;
  for (const auto& track : run.tracks) {
    if (track.states.size() < min_track_states) {
      continue;
    }
    const auto& from = origin.at(track.id);
    for (std::size_t k = 0; k < track.states.size(); ++k) {
      const auto& s = track.states[k];
      auto& acc = smoothed[from[k]];
      acc.first += (s.pose.translation - gt_torso(world, from[k], s.t)).norm();
      ++acc.second;
    }
  }
  for (const auto& a : world.agents) {
    const auto& t = tally[a.id];
    TrackingErrors e;
    e.agent = a.id;
    e.detections = t.n;
    e.outliers = t.outliers;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    e.raw = t.n > 0 ? t.raw / static_cast<double>(t.n) : nan;
    e.filtered = t.n_filtered > 0 ? t.filtered / static_cast<double>(t.n_filtered) : nan;
    const auto acc = smoothed[a.id];
    e.smoothed = acc.second > 0 ? acc.first / static_cast<double>(acc.second) : nan;
    e.tracked = acc.second;
    std::size_t best = 0;
    for (const auto& [id, count] : t.tracks) {
      if (count > best) {
        best = count;
        e.track = id;
      }
    }
    run.agents.push_back(e);
  }
  return run;
}

namespace {

Vec3 cad_centroid(const CadShape& cad) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : cad.model.points) {
    sum += p;
  }
  return sum / static_cast<double>(std::max<std::size_t>(1, cad.model.points.size()));
}

}  // namespace

Vec3 object_centroid(const ObjectSpec& object, const WorldSpec& world) {
  if (object.cad_id) {
    if (const auto* cad = world.find_cad(*object.cad_id)) {
      return object.pose.transform(cad_centroid(*cad));
    }
  }
  return object.pose.translation;
}

Vec3 object_centroid(const ObjectAttr& object, const WorldSpec& world) {
  if (object.known_shape) {
    if (const auto* cad = world.find_cad(*object.known_shape)) {
      return object.pose.transform(cad_centroid(*cad));
    }
  }
  return object.pose.translation;
}

std::vector<ObjectError> object_errors(const SceneGraph& graph, const WorldSpec& world) {
  std::vector<ObjectError> out;
  for (const auto id : graph.nodes_of<ObjectAttr>()) {
    const auto& attr = graph.get<ObjectAttr>(id);
    const Vec3 c = object_centroid(attr, world);
    ObjectError e;
    e.node = id;
    e.cls = attr.cls;
    e.known = attr.known_shape.has_value();
    e.error = std::numeric_limits<double>::infinity();
    for (const auto& o : world.objects) {
      if (o.cls != attr.cls) {
        continue;
      }
      const double d = (object_centroid(o, world) - c).norm();
      if (d < e.error) {
        e.error = d;
        e.truth = o.id;
      }
    }
    if (std::isfinite(e.error)) {
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace dsg
