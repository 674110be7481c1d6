#include "qcar/vehicle_model.hpp"

#include <cmath>
#include <stdexcept>

namespace qcar {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void SuspensionParams::validate() const {
  for (double v : {b_s, b_us, k_s, k_us, m_s, m_us}) {
    require(std::isfinite(v), "suspension parameters must be finite");
  }
  require(m_s > 0.0, "m_s must be positive");
  require(m_us > 0.0, "m_us must be positive");
  require(k_s >= 0.0, "k_s must be non-negative");
  require(k_us >= 0.0, "k_us must be non-negative");
  require(b_s >= 0.0, "b_s must be non-negative");
  require(b_us >= 0.0, "b_us must be non-negative");
}

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::kSuspensionTravel:
      return "suspension_travel";
    case Channel::kSprungMassAcceleration:
      return "sprung_mass_acceleration";
    case Channel::kSprungMassMotion:
      return "sprung_mass_motion";
  }
  return "unknown";
}

Channel channel_from_string(std::string_view name) {
  for (Channel c : kAllChannels) {
    if (to_string(c) == name) return c;
  }
  if (name == "travel") return Channel::kSuspensionTravel;
  if (name == "accel" || name == "acceleration") return Channel::kSprungMassAcceleration;
  if (name == "motion") return Channel::kSprungMassMotion;
  throw std::invalid_argument("unknown output channel: " + std::string(name));
}

double OutputChannels::operator[](Channel channel) const {
  switch (channel) {
    case Channel::kSuspensionTravel:
      return suspension_travel;
    case Channel::kSprungMassAcceleration:
      return sprung_mass_acceleration;
    case Channel::kSprungMassMotion:
      return sprung_mass_motion;
  }
  return 0.0;
}

StateSpace assemble_state_space(const SuspensionParams& p) {
  p.validate();
  StateSpace ss;
  const double ms = p.m_s;
  const double mus = p.m_us;

  // clang-format off
  ss.A <<  0.0,         1.0,           0.0,          -1.0,
          -p.k_s / ms, -p.b_s / ms,    0.0,           p.b_s / ms,
           0.0,         0.0,           0.0,           1.0,
           p.k_s / mus, p.b_s / mus,  -p.k_us / mus, -(p.b_s + p.b_us) / mus;

  // The actuator reacts against the wheel, so its wheel entry is -1/m_us.
  ss.B <<  0.0,           0.0,
           0.0,           1.0 / ms,
          -1.0,           0.0,
           p.b_us / mus, -1.0 / mus;

  ss.C <<  1.0,         0.0,         0.0,  0.0,
          -p.k_s / ms, -p.b_s / ms,  0.0,  p.b_s / ms,
           1.0,         0.0,         1.0,  0.0;

  ss.D <<  0.0, 0.0,
           0.0, 1.0 / ms,
           0.0, 0.0;
  // clang-format on
  return ss;
}

OutputChannels evaluate_outputs(const StateSpace& ss, const StateVector& x,
                                const Eigen::Vector2d& u, double z_r) {
  if (!x.allFinite() || !u.allFinite() || !std::isfinite(z_r)) {
    throw std::invalid_argument("evaluate_outputs: non-finite state or input");
  }
  const Eigen::Vector3d y = ss.C * x + ss.D * u;
  return {y[0], y[1], y[2] + z_r};
}

}  // namespace qcar
