#pragma once

#include <optional>
#include <utility>

#include "qcar/vehicle_model.hpp"

namespace qcar {

/// Parallel PID with filtered derivative k_d * n * s / (s + n).
struct PidGains {
  double k_p = 0.0;
  double k_i = 0.0;       ///< 1/s
  double k_d = 0.0;       ///< s
  double n_filter = 1000.0;  ///< derivative filter bandwidth, 1/s

  void validate() const;
};

/// Discrete controller memory. Zero-initialized means "at rest": the error
/// before the first sample is taken as 0.
struct PidState {
  double integral_accum = 0.0;
  double deriv_state = 0.0;  ///< filtered de/dt at the previous step (before k_d)
  double prev_error = 0.0;
};

/// One controller update: trapezoidal integral, backward-Euler filtered
/// derivative. Returns (u, next state).
std::pair<double, PidState> pid_step(const PidGains& gains, const PidState& state, double error,
                                     double dt);

struct PidLoop {
  PidGains gains;
  PidState state;
  bool enabled = true;
};

/// Motion loop regulates sprung mass motion, travel loop regulates suspension
/// travel; their outputs are summed into F_a.
struct DualLoopPid {
  PidLoop motion;
  PidLoop travel;
  double r_motion = 0.0;  ///< m
  double r_travel = 0.0;  ///< m
  /// When set, the simulation replaces r_motion with z_r every sample.
  bool motion_tracks_road = false;
  /// Symmetric actuator limit in N; unset means unconstrained.
  std::optional<double> force_limit;

  void reset();
};

struct ReferencePidGains {
  PidGains motion;
  PidGains travel;
};

/// Motion loop (3.2e5, 5.24e3, 3.8e6), travel loop (160, 1.27e4, 0).
ReferencePidGains reference_pid_gains(double n_filter = 1000.0);

DualLoopPid make_dual_loop(const PidGains& motion, const PidGains& travel);

/// Advances both loops by one sample and returns the commanded F_a (N).
double dual_loop_force(DualLoopPid& ctl, const OutputChannels& outputs, double dt);

}  // namespace qcar
