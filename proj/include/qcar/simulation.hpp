#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qcar/lqr_synthesis.hpp"
#include "qcar/pid_control.hpp"
#include "qcar/signals.hpp"
#include "qcar/vehicle_model.hpp"

namespace qcar {

enum class Variant { kPassive = 0, kPid = 1, kLqr = 2 };

inline constexpr std::array<Variant, 3> kAllVariants = {Variant::kPassive, Variant::kPid,
                                                        Variant::kLqr};

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct PassiveController {};

struct LqrController {
  Eigen::RowVector4d K = Eigen::RowVector4d::Zero();
};

using Controller = std::variant<PassiveController, DualLoopPid, LqrController>;

Variant variant_of(const Controller& controller);

/// Uniformly sampled closed-loop response. All series share one length.
struct Trajectory {
  std::string variant;
  std::string scenario;
  std::vector<double> t;
  std::vector<StateVector> x;
  std::vector<double> f_a;
  std::vector<double> z_r;
  std::vector<OutputChannels> outputs;
  double step_time = 0.0;
  double step_amplitude = 0.0;
  double last_event_time = 0.0;
  double road_asymptote = 0.0;  ///< noise-free road level at the horizon

  std::size_t size() const { return t.size(); }
  std::vector<double> channel(Channel c) const;
};

class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(const std::string& what, std::size_t last_finite_index)
      : std::runtime_error(what), last_finite_index_(last_finite_index) {}
  std::size_t last_finite_index() const { return last_finite_index_; }

 private:
  std::size_t last_finite_index_;
};

/// Fixed-step RK4 from rest. Road discontinuities enter as exact state jumps
/// x += B_road * dz at the grid point where they occur. The PID force is held
/// over each step; LQR feedback is applied continuously.
Trajectory simulate(const StateSpace& ss, Controller controller, const ScenarioSpec& spec);

struct PidSettings {
  PidGains motion;
  PidGains travel;
  bool motion_enabled = true;
  bool travel_enabled = true;
  double r_motion = 0.0;
  double r_travel = 0.0;
  /// Motion loop reference follows z_r instead of the constant r_motion.
  bool motion_tracks_road = false;
  std::optional<double> force_limit;

  DualLoopPid make_controller() const;
};

struct ExperimentSetup {
  SuspensionParams params;
  LqrWeights weights = reference_weights();
  PidSettings pid;

  static ExperimentSetup reference_defaults();
};

/// LQR design on the nominal plant of the setup.
LqrDesign design_nominal_lqr(const ExperimentSetup& setup);

/// One trajectory per (scenario, variant), scenario-major. The LQR gain is
/// synthesized once from the nominal plant and reused for every scenario.
std::vector<Trajectory> run_matrix(const ExperimentSetup& setup,
                                   const std::vector<ScenarioSpec>& scenarios,
                                   const std::vector<Variant>& variants);

/// Same as run_matrix with a precomputed gain.
std::vector<Trajectory> run_matrix(const ExperimentSetup& setup, const Eigen::RowVector4d& K,
                                   const std::vector<ScenarioSpec>& scenarios,
                                   const std::vector<Variant>& variants);

}  // namespace qcar
