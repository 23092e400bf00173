#include "dsg/tracking.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace dsg {

std::string_view verdict_name(FilterVerdict v) {
  switch (v) {
    case FilterVerdict::kAccept:
      return "accept";
    case FilterVerdict::kTooSmall:
      return "too-small";
    case FilterVerdict::kAtBorder:
      return "at-border";
  }
  return "accept";
}

FilterVerdict filter_detection(const Detection& det, const GateConfig& cfg) {
  const BoundingBox2d& b = det.bbox;
  if (std::min(b.width(), b.height()) <= cfg.min_bbox) {
    return FilterVerdict::kTooSmall;
  }
  const double m = cfg.border_margin;
  if (b.x0 <= m || b.y0 <= m || b.x1 >= det.image_width - m || b.y1 >= det.image_height - m) {
    return FilterVerdict::kAtBorder;
  }
  return FilterVerdict::kAccept;
}

std::optional<JointDisplacement> joint_displacement(const Detection& det,
                                                    const AgentTrack& track) {
  if (track.empty()) {
    return std::nullopt;
  }
  const Skeleton* last = track.skeletons.size() == track.states.size()
                             ? &track.skeletons.back()
                             : nullptr;
  JointDisplacement d;
  if (det.joints.empty() && (last == nullptr || last->empty())) {
    // skeleton-less agents are gated on the torso alone
    d.max = (det.torso.translation - track.states.back().pose.translation).norm();
    d.mean = d.max;
    return d;
  }
  if (last == nullptr || last->size() != det.joints.size()) {
    return std::nullopt;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < det.joints.size(); ++j) {
    const double dist = (det.joints[j] - (*last)[j]).norm();
    d.max = std::max(d.max, dist);
    sum += dist;
  }
  d.mean = sum / static_cast<double>(det.joints.size());
  return d;
}

namespace {

std::optional<JointDisplacement> gated(const Detection& det, const AgentTrack& track,
                                       const GateConfig& cfg) {
  if (track.empty() || track.cls != det.cls || !(det.t > track.end_time())) {
    return std::nullopt;
  }
  const auto d = joint_displacement(det, track);
  if (!d) {
    return std::nullopt;
  }
  const double dt = std::max(det.t - track.end_time(), cfg.min_dt);
  if (d->max > cfg.max_joint_disp * dt / cfg.interval) {
    return std::nullopt;
  }
  return d;
}

}  // namespace

bool gate_accepts(const Detection& det, const AgentTrack& track, const GateConfig& cfg) {
  return gated(det, track, cfg).has_value();
}

std::optional<std::uint64_t> associate(const Detection& det, std::span<const AgentTrack> tracks,
                                       const GateConfig& cfg) {
  std::optional<std::uint64_t> best;
  double best_mean = 0.0;
  for (const auto& track : tracks) {
    const auto d = gated(det, track, cfg);
    if (!d) {
      continue;
    }
    if (!best || d->mean < best_mean || (d->mean == best_mean && track.id < *best)) {
      best = track.id;
      best_mean = d->mean;
    }
  }
  return best;
}

void append_measurement(AgentTrack& track, const Detection& det, double w_d, double w_m) {
  if (!track.empty() && !(det.t > track.end_time())) {
    throw std::invalid_argument("detection timestamp is not after the last track state");
  }
  const std::size_t index = track.states.size();
  track.states.push_back({det.t, det.torso});
  track.priors.push_back({index, det.t, det.torso, w_d});
  if (index > 0) {
    track.motion.push_back({index - 1, index, track.states[index - 1].t, det.t, w_m});
  }
  track.skeletons.push_back(det.joints);
}

namespace {

Vec3 interpolate_position(std::span<const TrackState> gt, double t) {
  const auto it = std::lower_bound(gt.begin(), gt.end(), t,
                                   [](const TrackState& s, double v) { return s.t < v; });
  if (it->t == t || it == gt.begin()) {
    return it->pose.translation;
  }
  const TrackState& b = *it;
  const TrackState& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  return (1.0 - u) * a.pose.translation + u * b.pose.translation;
}

}  // namespace

double track_error(std::span<const TrackState> states, std::span<const TrackState> ground_truth) {
  double sum = 0.0;
  std::size_t count = 0;
  if (!ground_truth.empty()) {
    const double lo = ground_truth.front().t;
    const double hi = ground_truth.back().t;
    for (const auto& s : states) {
      if (s.t < lo || s.t > hi) {
        continue;
      }
      sum += (s.pose.translation - interpolate_position(ground_truth, s.t)).norm();
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("track and ground truth do not overlap in time");
  }
  return sum / static_cast<double>(count);
}

double track_error(const AgentTrack& track, std::span<const TrackState> ground_truth) {
  return track_error(track.states, ground_truth);
}

MultiAgentTracker::FrameResult MultiAgentTracker::process_frame(
    std::span<const Detection> detections) {
  FrameResult result;
  result.verdicts.reserve(detections.size());
  result.track_of.assign(detections.size(), std::nullopt);

  struct Candidate {
    double mean;
    std::uint64_t track_id;
    std::size_t track_index;
    std::size_t det;
  };
  std::vector<Candidate> candidates;
  std::vector<std::size_t> accepted;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    result.verdicts.push_back(filter_detection(detections[i], config_.gate));
    if (result.verdicts.back() != FilterVerdict::kAccept) {
      continue;
    }
    accepted.push_back(i);
    for (std::size_t k = 0; k < tracks_.size(); ++k) {
      if (config_.max_gap > 0.0 && !tracks_[k].empty() &&
          detections[i].t - tracks_[k].end_time() > config_.max_gap) {
        continue;  // retired
      }
      if (const auto d = gated(detections[i], tracks_[k], config_.gate)) {
        candidates.push_back({d->mean, tracks_[k].id, k, i});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.mean, a.track_id, a.det) < std::tie(b.mean, b.track_id, b.det);
  });

  std::vector<bool> track_used(tracks_.size(), false);
  std::vector<bool> det_done(detections.size(), false);
  for (const auto& c : candidates) {
    if (track_used[c.track_index] || det_done[c.det]) {
      continue;
    }
    track_used[c.track_index] = true;
    det_done[c.det] = true;
    append_measurement(tracks_[c.track_index], detections[c.det], config_.prior_weight,
                       config_.motion_weight);
    result.track_of[c.det] = c.track_id;
  }
  for (const std::size_t i : accepted) {
    if (det_done[i]) {
      continue;
    }
    AgentTrack track;
    track.id = next_id_++;
    track.cls = detections[i].cls;
    append_measurement(track, detections[i], config_.prior_weight, config_.motion_weight);
    result.track_of[i] = track.id;
    tracks_.push_back(std::move(track));
  }
  return result;
}

void MultiAgentTracker::optimize_all() {
  for (auto& track : tracks_) {
    track.states = optimize_track(track, config_.optimizer).states;
  }
}

AgentTrack track_from_trajectory(std::uint64_t id, AgentClass cls,
                                 std::span<const TrackState> poses, double prior_weight) {
  AgentTrack track;
  track.id = id;
  track.cls = cls;
  for (const auto& s : poses) {
    if (!track.empty() && !(s.t > track.end_time())) {
      throw std::invalid_argument("trajectory timestamps are not strictly increasing");
    }
    const std::size_t index = track.states.size();
    track.states.push_back(s);
    track.priors.push_back({index, s.t, s.pose, prior_weight});
    track.skeletons.emplace_back();
  }
  return track;
}

}  // namespace dsg
