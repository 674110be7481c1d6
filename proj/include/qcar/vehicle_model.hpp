#pragma once

#include <array>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qcar {

/// Physical constants of the two-mass quarter-car model, SI units.
struct SuspensionParams {
  double b_s = 1544.0;     ///< suspension damping, N*s/m
  double b_us = 0.0;       ///< tyre damping, N*s/m
  double k_s = 26000.0;    ///< suspension stiffness, N/m
  double k_us = 100000.0;  ///< tyre stiffness, N/m
  double m_s = 234.0;      ///< sprung mass, kg
  double m_us = 43.0;      ///< unsprung mass, kg

  /// Reference passenger-car values (b_us = 0).
  static SuspensionParams reference() { return {}; }

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  bool operator==(const SuspensionParams&) const = default;
};

/// x1 suspension travel (Z_s - Z_us), x2 sprung velocity, x3 wheel
/// deflection (Z_us - Z_r), x4 unsprung velocity.
using StateVector = Eigen::Vector4d;

enum class Channel { kSuspensionTravel = 0, kSprungMassAcceleration = 1, kSprungMassMotion = 2 };

inline constexpr std::array<Channel, 3> kAllChannels = {
    Channel::kSuspensionTravel, Channel::kSprungMassAcceleration, Channel::kSprungMassMotion};

std::string_view to_string(Channel channel);
Channel channel_from_string(std::string_view name);

/// Continuous-time plant. Input 0 is the road velocity Ż_r, input 1 the
/// actuator force F_a. Output row 2 (sprung mass motion) excludes Z_r, which
/// is added by whoever knows the road displacement.
struct StateSpace {
  Eigen::Matrix4d A;
  Eigen::Matrix<double, 4, 2> B;
  Eigen::Matrix<double, 3, 4> C;
  Eigen::Matrix<double, 3, 2> D;
  std::array<std::string, 2> input_names{"road_velocity", "actuator_force"};
  std::array<std::string, 3> output_names{"suspension_travel", "sprung_mass_acceleration",
                                          "sprung_mass_motion"};

  Eigen::Vector4d road_column() const { return B.col(0); }
  Eigen::Vector4d force_column() const { return B.col(1); }
};

struct OutputChannels {
  double suspension_travel = 0.0;
  double sprung_mass_acceleration = 0.0;
  double sprung_mass_motion = 0.0;

  double operator[](Channel channel) const;
};

StateSpace assemble_state_space(const SuspensionParams& params);

/// Evaluates the three physical outputs for state x, inputs (Ż_r, F_a) and
/// road displacement z_r.
OutputChannels evaluate_outputs(const StateSpace& ss, const StateVector& x,
                                const Eigen::Vector2d& u, double z_r);

}  // namespace qcar
