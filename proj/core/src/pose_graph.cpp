#include "dsg/pose_graph.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>

namespace dsg {

Pose retract(const Pose& x, const Vector6& delta) {
  Pose out;
  out.rotation = (x.rotation * so3_exp(delta.head<3>())).normalized();
  out.translation = x.translation + delta.tail<3>();
  return out;
}

Vector6 prior_residual(const Pose& x, const Pose& measured, Matrix6* jacobian) {
  Vector6 r;
  const Vec3 phi = so3_log(measured.rotation.conjugate() * x.rotation);
  r.head<3>() = phi;
  r.tail<3>() = x.translation - measured.translation;
  if (jacobian != nullptr) {
    jacobian->setZero();
    jacobian->topLeftCorner<3, 3>() = so3_right_jacobian_inv(phi);
    jacobian->bottomRightCorner<3, 3>() = Mat3::Identity();
  }
  return r;
}

Vector6 between_residual(const Pose& a, const Pose& b, Matrix6* jac_a, Matrix6* jac_b) {
  Vector6 r;
  const Vec3 phi = so3_log(a.rotation.conjugate() * b.rotation);
  r.head<3>() = phi;
  r.tail<3>() = b.translation - a.translation;
  if (jac_a != nullptr) {
    jac_a->setZero();
    jac_a->topLeftCorner<3, 3>() = -so3_right_jacobian_inv(-phi);
    jac_a->bottomRightCorner<3, 3>() = -Mat3::Identity();
  }
  if (jac_b != nullptr) {
    jac_b->setZero();
    jac_b->topLeftCorner<3, 3>() = so3_right_jacobian_inv(phi);
    jac_b->bottomRightCorner<3, 3>() = Mat3::Identity();
  }
  return r;
}

double pose_graph_cost(const AgentTrack& track, std::span<const TrackState> states) {
  double cost = 0.0;
  for (const auto& f : track.priors) {
    cost += f.weight * prior_residual(states[f.state].pose, f.measurement).squaredNorm();
  }
  for (const auto& f : track.motion) {
    cost += f.weight * between_residual(states[f.from].pose, states[f.to].pose).squaredNorm();
  }
  return cost;
}

namespace {

void add_block(std::vector<Eigen::Triplet<double>>& triplets, std::size_t row, std::size_t col,
               const Matrix6& block) {
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (block(i, j) != 0.0) {
        triplets.emplace_back(static_cast<int>(6 * row + i), static_cast<int>(6 * col + j),
                              block(i, j));
      }
    }
  }
}

}  // namespace

OptimizeResult optimize_track(const AgentTrack& track, const OptimizerOptions& options) {
  OptimizeResult result;
  result.states = track.states;
  const std::size_t n = track.states.size();
  double cost = pose_graph_cost(track, result.states);
  result.cost_history.push_back(cost);
  if (n == 0) {
    result.converged = true;
    return result;
  }

  const auto dim = static_cast<Eigen::Index>(6 * n);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    triplets.clear();
    Eigen::VectorXd gradient = Eigen::VectorXd::Zero(dim);
    Matrix6 ja;
    Matrix6 jb;
    for (const auto& f : track.priors) {
      const Vector6 r = prior_residual(result.states[f.state].pose, f.measurement, &ja);
      add_block(triplets, f.state, f.state, f.weight * ja.transpose() * ja);
      gradient.segment<6>(static_cast<Eigen::Index>(6 * f.state)) += f.weight * ja.transpose() * r;
    }
    for (const auto& f : track.motion) {
      const Vector6 r =
          between_residual(result.states[f.from].pose, result.states[f.to].pose, &ja, &jb);
      add_block(triplets, f.from, f.from, f.weight * ja.transpose() * ja);
      add_block(triplets, f.to, f.to, f.weight * jb.transpose() * jb);
      add_block(triplets, f.from, f.to, f.weight * ja.transpose() * jb);
      add_block(triplets, f.to, f.from, f.weight * jb.transpose() * ja);
      gradient.segment<6>(static_cast<Eigen::Index>(6 * f.from)) += f.weight * ja.transpose() * r;
      gradient.segment<6>(static_cast<Eigen::Index>(6 * f.to)) += f.weight * jb.transpose() * r;
    }
    // keeps states without any factor (zero weights) solvable
    for (Eigen::Index i = 0; i < dim; ++i) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1e-12);
    }
    Eigen::SparseMatrix<double> hessian(dim, dim);
    hessian.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(hessian);
    if (solver.info() != Eigen::Success) {
      break;
    }
    const Eigen::VectorXd delta = solver.solve(-gradient);
    if (solver.info() != Eigen::Success || !delta.allFinite()) {
      break;
    }
    ++result.iterations;
    if (delta.norm() < options.update_tolerance) {
      result.converged = true;
      break;
    }

    double step = 1.0;
    bool accepted = false;
    std::vector<TrackState> candidate = result.states;
    for (int halving = 0; halving < 20; ++halving) {
      for (std::size_t i = 0; i < n; ++i) {
        candidate[i].pose = retract(result.states[i].pose,
                                    step * delta.segment<6>(static_cast<Eigen::Index>(6 * i)));
      }
      const double new_cost = pose_graph_cost(track, candidate);
      if (new_cost <= cost) {
        result.states = candidate;
        cost = new_cost;
        result.cost_history.push_back(cost);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      break;
    }
    if (step * delta.norm() < options.update_tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace dsg
