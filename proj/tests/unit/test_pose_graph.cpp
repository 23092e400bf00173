#include "dsg/pose_graph.hpp"
#include "dsg/tracking.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <random>

using namespace dsg;

using test::chain;

TEST_SUITE("pose-graph") {

TEST_CASE("retract with zero update is the identity") {
  std::mt19937 rng(1);
  const Pose x = test::random_pose(rng);
  const Pose y = retract(x, Vector6::Zero());
  CHECK(rotation_angle(x.rotation, y.rotation) < 1e-12);
  CHECK(x.translation == y.translation);
}

TEST_CASE("analytic Jacobians match central differences") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    CHECK(test::jacobian_error(rng) <= 1e-5);
  }
}

TEST_CASE("Gauss-Newton cost never increases") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto z = test::noisy_walk(rng, 12, 0.3);
    AgentTrack track = chain(z, 1.0, 4.0);
    for (auto& s : track.states) {  // perturbed start
      s.pose = retract(s.pose, (Vector6() << test::random_vec(rng, -0.5, 0.5),
                                test::random_vec(rng, -0.5, 0.5))
                                   .finished());
    }
    const auto result = optimize_track(track);
    REQUIRE(result.cost_history.size() >= 2);
    for (std::size_t k = 1; k < result.cost_history.size(); ++k) {
      CHECK(result.cost_history[k] <= result.cost_history[k - 1]);
    }
    CHECK(result.converged);
  }
}

TEST_CASE("three detections on a line solve the tridiagonal system") {
  const std::vector<Pose> z = {Pose(Vec3(0, 0, 0)), Pose(Vec3(1, 0, 0)), Pose(Vec3(2, 0, 0))};
  const auto result = optimize_track(chain(z, 1.0, 1.0));
  // (I + L) t = z gives t = [1/2, 1, 3/2]
  CHECK(result.states[0].pose.translation.x() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(result.states[1].pose.translation.x() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(result.states[2].pose.translation.x() == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("translation chains equal the dense linear solve") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> len(2, 30);
  std::uniform_real_distribution<double> w(0.05, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Pose> z;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      z.push_back(Pose(test::random_vec(rng, -5.0, 5.0)));
    }
    const double w_d = w(rng);
    const double w_m = w(rng);
    const auto result = optimize_track(chain(z, w_d, w_m));
    const Eigen::MatrixXd oracle = test::dense_translation_solve(z, w_d, w_m);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, (result.states[static_cast<std::size_t>(i)].pose.translation -
                               oracle.row(i).transpose())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("weight limits") {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Pose> z;
    Vec3 mean = Vec3::Zero();
    for (int i = 0; i < 10; ++i) {
      z.push_back(Pose(test::random_vec(rng, -3.0, 3.0)));
      mean += z.back().translation / 10.0;
    }
    SUBCASE("decoupled priors") {
      const auto result = optimize_track(chain(z, 1.0, 0.0));
      for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK((result.states[i].pose.translation - z[i].translation).norm() < 1e-12);
      }
    }
    SUBCASE("w_m / w_d = 1e-6 follows the detections") {
      const auto result = optimize_track(chain(z, 1.0, 1e-6));
      for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK((result.states[i].pose.translation - z[i].translation).norm() <= 1e-3);
      }
    }
    SUBCASE("w_m / w_d = 1e6 collapses to the mean") {
      const auto result = optimize_track(chain(z, 1.0, 1e6));
      for (const auto& s : result.states) {
        CHECK((s.pose.translation - mean).norm() <= 1e-3);
      }
    }
  }
}

TEST_CASE("rotations are smoothed toward their neighbours") {
  std::vector<Pose> z;
  for (int i = 0; i < 5; ++i) {
    z.push_back(Pose::from_yaw(i == 2 ? 0.5 : 0.0, Vec3::Zero()));
  }
  const auto result = optimize_track(chain(z, 1.0, 4.0));
  const double yaw = result.states[2].pose.yaw();
  CHECK(yaw > 0.0);
  CHECK(yaw < 0.5);
}

TEST_CASE("empty and single-state tracks") {
  CHECK(optimize_track(AgentTrack{}).states.empty());
  const std::vector<Pose> z = {Pose::from_yaw(1.0, Vec3(1, 2, 3))};
  const auto result = optimize_track(chain(z, 1.0, 4.0));
  REQUIRE(result.states.size() == 1);
  CHECK((result.states[0].pose.translation - z[0].translation).norm() < 1e-12);
}

}  // TEST_SUITE
