#include "qcar/pid_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcar {

void PidGains::validate() const {
  if (!std::isfinite(k_p) || !std::isfinite(k_i) || !std::isfinite(k_d) ||
      !std::isfinite(n_filter)) {
    throw std::invalid_argument("PID gains must be finite");
  }
  if (k_p < 0.0 || k_i < 0.0 || k_d < 0.0) {
    throw std::invalid_argument("PID gains k_p, k_i, k_d must be non-negative");
  }
  if (!(n_filter > 0.0)) throw std::invalid_argument("PID n_filter must be positive");
}

std::pair<double, PidState> pid_step(const PidGains& g, const PidState& s, double e, double dt) {
  if (!std::isfinite(e)) throw std::invalid_argument("pid_step: non-finite error sample");
  if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be positive");
  PidState next;
  next.integral_accum = s.integral_accum + 0.5 * (e + s.prev_error) * dt;
  next.deriv_state = (s.deriv_state + g.n_filter * (e - s.prev_error)) / (1.0 + g.n_filter * dt);
  next.prev_error = e;
  const double u = g.k_p * e + g.k_i * next.integral_accum + g.k_d * next.deriv_state;
  return {u, next};
}

void DualLoopPid::reset() {
  motion.state = {};
  travel.state = {};
}

ReferencePidGains reference_pid_gains(double n_filter) {
  ReferencePidGains out;
  out.motion = {3.2e5, 5.24e3, 3.8e6, n_filter};
  out.travel = {160.0, 1.27e4, 0.0, n_filter};
  return out;
}

DualLoopPid make_dual_loop(const PidGains& motion, const PidGains& travel) {
  motion.validate();
  travel.validate();
  DualLoopPid ctl;
  ctl.motion.gains = motion;
  ctl.travel.gains = travel;
  return ctl;
}

double dual_loop_force(DualLoopPid& ctl, const OutputChannels& y, double dt) {
  double force = 0.0;
  if (ctl.motion.enabled) {
    auto [u, s] = pid_step(ctl.motion.gains, ctl.motion.state, ctl.r_motion - y.sprung_mass_motion, dt);
    ctl.motion.state = s;
    force += u;
  }
  if (ctl.travel.enabled) {
    auto [u, s] = pid_step(ctl.travel.gains, ctl.travel.state, ctl.r_travel - y.suspension_travel, dt);
    ctl.travel.state = s;
    force += u;
  }
  if (ctl.force_limit) force = std::clamp(force, -*ctl.force_limit, *ctl.force_limit);
  return force;
}

}  // namespace qcar
