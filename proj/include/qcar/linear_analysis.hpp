#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcar/dense_eigen.hpp"
#include "qcar/pid_control.hpp"
#include "qcar/simulation.hpp"
#include "qcar/vehicle_model.hpp"

namespace qcar {

/// Continuous-time closed loop driven by the road velocity Ż_r. One output
/// row per physical channel; motion is measured relative to the road.
struct ClosedLoopSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::MatrixXd C;  ///< 3 x n
  Eigen::Vector3d D = Eigen::Vector3d::Zero();
  Variant variant = Variant::kPassive;
  std::string label;

  Eigen::Index state_dim() const { return A.rows(); }
  void validate() const;
};

ClosedLoopSystem open_loop(const StateSpace& ss);

/// A - b_F K with the disturbance column unchanged.
ClosedLoopSystem close_loop_lqr(const StateSpace& ss, const Eigen::RowVectorXd& K);

/// Plant plus both PID loops in continuous time. The loops share one
/// integrator state (their integral actions are summed into F_a), and each
/// loop with k_d > 0 adds one derivative-filter state.
ClosedLoopSystem close_loop_pid(const StateSpace& ss, const PidGains& motion, const PidGains& travel);
ClosedLoopSystem close_loop_pid(const StateSpace& ss, const PidSettings& settings);

std::vector<Complex> compute_poles(const ClosedLoopSystem& sys);

struct ZeroSet {
  std::vector<Complex> zeros;
  double gain = 0.0;         ///< leading coefficient of the transfer numerator
  int relative_degree = 0;   ///< number of infinite zeros
};

/// Finite invariant zeros of the SISO map Ż_r -> channel, i.e. the finite
/// eigenvalues of the pencil [[A - sI, B], [c, d]].
ZeroSet compute_zero_set(const ClosedLoopSystem& sys, Channel channel);
std::vector<Complex> compute_zeros(const ClosedLoopSystem& sys, Channel channel);

/// c (sI - A)^{-1} b + d evaluated at complex s.
Complex transfer_value(const ClosedLoopSystem& sys, Channel channel, Complex s);

enum class Stability { kStable, kUnstable };

std::string to_string(Stability s);

/// Stable iff every pole satisfies Re < -margin.
Stability stability_verdict(const std::vector<Complex>& poles, double margin = 0.0);

struct PoleZeroMap {
  Variant variant = Variant::kPassive;
  Channel channel = Channel::kSuspensionTravel;
  std::vector<Complex> poles;
  std::vector<Complex> zeros;
};

PoleZeroMap pole_zero_map(const ClosedLoopSystem& sys, Channel channel);

}  // namespace qcar
