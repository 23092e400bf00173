#pragma once

#include "dsg/agent_track.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace dsg {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Local update on SO(3) x R^3: delta = [rotation vector, translation].
Pose retract(const Pose& x, const Vector6& delta);

/// r = [Log(Rz^T R); t - tz]. J (optional) is dr/d(delta) at delta = 0.
Vector6 prior_residual(const Pose& x, const Pose& measured, Matrix6* jacobian = nullptr);

/// r = [Log(Ra^T Rb); tb - ta] with Jacobians w.r.t. both local updates.
Vector6 between_residual(const Pose& a, const Pose& b, Matrix6* jac_a = nullptr,
                         Matrix6* jac_b = nullptr);

/// Sum of weighted squared residual norms over priors and motion factors.
double pose_graph_cost(const AgentTrack& track, std::span<const TrackState> states);

struct OptimizerOptions {
  int max_iterations = 50;
  double update_tolerance = 1e-8;
};

struct OptimizeResult {
  std::vector<TrackState> states;
  bool converged = false;
  int iterations = 0;
  /// Cost before the first iteration followed by the cost after each
  /// accepted step.
  std::vector<double> cost_history;
};

/// Gauss-Newton over the track's states (block-tridiagonal normal
/// equations). Steps that would raise the cost are halved until they do
/// not; if none helps the best iterate is returned with converged = false.
OptimizeResult optimize_track(const AgentTrack& track, const OptimizerOptions& options = {});

}  // namespace dsg
