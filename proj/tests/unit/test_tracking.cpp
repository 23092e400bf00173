#include "dsg/json_util.hpp"
#include "dsg/tracking.hpp"
#include "dsg/tracking_io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace dsg;

namespace {

std::vector<Vec3> skeleton_at(const Vec3& c) {
  std::vector<Vec3> joints;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    joints.push_back(c + Vec3(0.0, 0.05 * static_cast<double>(j % 5), 0.08 * static_cast<double>(j)));
  }
  return joints;
}

Detection detection_at(double t, const Vec3& c) {
  Detection det;
  det.t = t;
  det.torso = Pose(c);
  det.joints = skeleton_at(c);
  det.bbox = {100, 100, 200, 300};
  return det;
}

AgentTrack track_at(std::uint64_t id, double t, const Vec3& c) {
  AgentTrack track;
  track.id = id;
  append_measurement(track, detection_at(t, c), 1.0, 4.0);
  return track;
}

}  // namespace

TEST_SUITE("tracking") {

TEST_CASE("box filter") {
  const GateConfig cfg;
  Detection det = detection_at(0.0, Vec3::Zero());
  CHECK(filter_detection(det, cfg) == FilterVerdict::kAccept);
  det.bbox = {100, 100, 129, 300};
  CHECK(filter_detection(det, cfg) == FilterVerdict::kTooSmall);
  det.bbox = {100, 100, 130, 300};
  CHECK(filter_detection(det, cfg) == FilterVerdict::kTooSmall);  // boundary rejects
  det.bbox = {0.5, 100, 200, 300};
  CHECK(filter_detection(det, cfg) == FilterVerdict::kAtBorder);
  det.bbox = {100, 100, 639.5, 300};
  CHECK(filter_detection(det, cfg) == FilterVerdict::kAtBorder);
  CHECK(verdict_name(FilterVerdict::kAtBorder) == "at-border");
}

TEST_CASE("joint displacement") {
  const AgentTrack track = track_at(1, 0.0, Vec3::Zero());
  const auto d = joint_displacement(detection_at(0.5, Vec3(0.3, 0.4, 0.0)), track);
  REQUIRE(d);
  CHECK(d->max == doctest::Approx(0.5));
  CHECK(d->mean == doctest::Approx(0.5));

  Detection partial = detection_at(0.5, Vec3::Zero());
  partial.joints.pop_back();
  CHECK_FALSE(joint_displacement(partial, track));
  CHECK_FALSE(joint_displacement(partial, AgentTrack{}));
}

TEST_CASE("gate uses 3 m per second") {
  const GateConfig cfg;
  const AgentTrack track = track_at(1, 0.0, Vec3::Zero());
  CHECK(gate_accepts(detection_at(1.0, Vec3(2.9, 0, 0)), track, cfg));
  CHECK_FALSE(gate_accepts(detection_at(1.0, Vec3(3.1, 0, 0)), track, cfg));
  CHECK(gate_accepts(detection_at(0.2, Vec3(0.55, 0, 0)), track, cfg));
  CHECK_FALSE(gate_accepts(detection_at(0.2, Vec3(0.65, 0, 0)), track, cfg));
  // not after the last state
  CHECK_FALSE(gate_accepts(detection_at(0.0, Vec3::Zero()), track, cfg));
  Detection robot = detection_at(1.0, Vec3::Zero());
  robot.cls = AgentClass::kRobot;
  CHECK_FALSE(gate_accepts(robot, track, cfg));
}

TEST_CASE("gate is monotone in elapsed time") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dt(0.0, 2.0);
  const GateConfig cfg;
  for (int trial = 0; trial < 500; ++trial) {
    const AgentTrack track = track_at(1, 0.0, Vec3::Zero());
    const Vec3 c = test::random_vec(rng, -3.0, 3.0);
    const double t1 = dt(rng) + 1e-3;
    const double t2 = t1 + dt(rng);
    if (gate_accepts(detection_at(t1, c), track, cfg)) {
      CHECK(gate_accepts(detection_at(t2, c), track, cfg));
    }
  }
}

TEST_CASE("association prefers the smallest mean displacement, then the lowest id") {
  const GateConfig cfg;
  const std::vector<AgentTrack> tracks = {track_at(5, 0.0, Vec3(1, 0, 0)),
                                          track_at(3, 0.0, Vec3(-1, 0, 0)),
                                          track_at(9, 0.0, Vec3(0.2, 0, 0))};
  CHECK(associate(detection_at(1.0, Vec3(0.3, 0, 0)), tracks, cfg) == 9u);
  CHECK(associate(detection_at(1.0, Vec3(0.0, 0, 0)), std::span(tracks).first(2), cfg) == 3u);
  CHECK_FALSE(associate(detection_at(1.0, Vec3(30.0, 0, 0)), tracks, cfg));
}

TEST_CASE("append_measurement adds one prior and one motion factor") {
  AgentTrack track;
  append_measurement(track, detection_at(0.0, Vec3::Zero()), 1.0, 4.0);
  CHECK(track.priors.size() == 1);
  CHECK(track.motion.empty());
  append_measurement(track, detection_at(0.2, Vec3(0.1, 0, 0)), 2.0, 3.0);
  REQUIRE(track.motion.size() == 1);
  CHECK(track.motion[0].from == 0);
  CHECK(track.motion[0].to == 1);
  CHECK(track.motion[0].weight == 3.0);
  CHECK(track.priors[1].weight == 2.0);
  CHECK(track.skeletons.size() == 2);
  CHECK_THROWS_AS(append_measurement(track, detection_at(0.2, Vec3::Zero()), 1.0, 4.0),
                  std::invalid_argument);
}

TEST_CASE("track error interpolates the ground truth") {
  const std::vector<TrackState> gt = {{0.0, Pose(Vec3(0, 0, 0))}, {1.0, Pose(Vec3(1, 0, 0))}};
  const std::vector<TrackState> est = {{0.5, Pose(Vec3(0.5, 0.3, 0))},
                                       {1.0, Pose(Vec3(1, 0.1, 0))},
                                       {2.0, Pose(Vec3(9, 9, 9))}};
  CHECK(track_error(est, gt) == doctest::Approx(0.2));
  CHECK_THROWS_AS((void)track_error(std::span(est).last(1), gt), std::invalid_argument);
}

TEST_CASE("tracker separates agents and drops boxes the filter rejects") {
  MultiAgentTracker tracker;
  for (int k = 0; k < 20; ++k) {
    const double t = 0.2 * k;
    std::vector<Detection> frame = {detection_at(t, Vec3(0.2 * t, 0, 0)),
                                    detection_at(t, Vec3(5.0 - 0.2 * t, 2.0, 0))};
    if (k == 10) {
      Detection bad = detection_at(t, Vec3(2.0, 1.0, 0));
      bad.bbox = {100, 100, 110, 110};
      frame.push_back(bad);
    }
    const auto result = tracker.process_frame(frame);
    CHECK(result.verdicts[0] == FilterVerdict::kAccept);
    if (k == 10) {
      CHECK(result.verdicts[2] == FilterVerdict::kTooSmall);
      CHECK_FALSE(result.track_of[2]);
    }
  }
  REQUIRE(tracker.tracks().size() == 2);
  CHECK(tracker.tracks()[0].states.size() == 20);
  CHECK(tracker.tracks()[1].states.size() == 20);
  tracker.optimize_all();
  CHECK(tracker.tracks()[0].states.size() == 20);
}

TEST_CASE("competing detections go to the closest track") {
  MultiAgentTracker tracker;
  tracker.process_frame(std::vector{detection_at(0.0, Vec3::Zero())});
  const auto result = tracker.process_frame(
      std::vector{detection_at(0.2, Vec3(0.4, 0, 0)), detection_at(0.2, Vec3(0.1, 0, 0))});
  CHECK(result.track_of[1] == 1u);
  CHECK(result.track_of[0] == 2u);
}

TEST_CASE("tracks stop taking detections after a long gap") {
  TrackerConfig cfg;
  cfg.max_gap = 1.0;
  MultiAgentTracker tracker(cfg);
  tracker.process_frame(std::vector{detection_at(0.0, Vec3::Zero())});
  tracker.process_frame(std::vector{detection_at(1.5, Vec3::Zero())});
  CHECK(tracker.tracks().size() == 2);

  cfg.max_gap = 0.0;
  MultiAgentTracker keep(cfg);
  keep.process_frame(std::vector{detection_at(0.0, Vec3::Zero())});
  keep.process_frame(std::vector{detection_at(1.5, Vec3::Zero())});
  CHECK(keep.tracks().size() == 1);
}

TEST_CASE("robot tracks come straight from poses") {
  const std::vector<TrackState> poses = {{0.0, Pose(Vec3(0, 0, 0))}, {0.2, Pose(Vec3(1, 0, 0))}};
  const AgentTrack track = track_from_trajectory(7, AgentClass::kRobot, poses);
  CHECK(track.id == 7);
  CHECK(track.states.size() == 2);
  CHECK(track.priors.size() == 2);
  CHECK(track.motion.empty());
  const std::vector<TrackState> bad = {{0.2, Pose()}, {0.1, Pose()}};
  CHECK_THROWS_AS(track_from_trajectory(1, AgentClass::kRobot, bad), std::invalid_argument);
}

TEST_CASE("detection stream round-trips") {
  std::mt19937 rng(2);
  std::vector<Detection> dets;
  for (int i = 0; i < 5; ++i) {
    Detection d = detection_at(0.2 * i, test::random_vec(rng, -2, 2));
    d.torso = test::random_pose(rng);
    d.cls = i % 2 == 0 ? AgentClass::kHuman : AgentClass::kRobot;
    dets.push_back(d);
  }
  std::stringstream ss;
  write_detections(ss, dets);
  const auto back = read_detections(ss);
  REQUIRE(back.size() == dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    CHECK(back[i].t == dets[i].t);
    CHECK(back[i].cls == dets[i].cls);
    CHECK(back[i].torso == dets[i].torso);
    CHECK(back[i].joints == dets[i].joints);
    CHECK(back[i].bbox.x1 == dets[i].bbox.x1);
  }
  std::stringstream broken(R"({"t": 0, "class": "dog"})");
  CHECK_THROWS_AS(read_detections(broken), ParseError);
}

TEST_CASE("track JSON round-trips") {
  AgentTrack track = track_at(4, 0.0, Vec3(1, 2, 3));
  append_measurement(track, detection_at(0.2, Vec3(1.1, 2, 3)), 1.0, 4.0);
  CHECK(track_from_json(track_to_json(track)) == track);
  const Json report = track_report(track, track.states);
  CHECK(report["raw"].size() == 2);
  CHECK(report["smoothed"].size() == 2);
}

}  // TEST_SUITE
