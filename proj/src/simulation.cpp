#include "qcar/simulation.hpp"

#include <cmath>
#include <sstream>

namespace qcar {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kPassive:
      return "passive";
    case Variant::kPid:
      return "pid";
    case Variant::kLqr:
      return "lqr";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  for (Variant v : kAllVariants) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown variant: " + name);
}

Variant variant_of(const Controller& controller) {
  return static_cast<Variant>(controller.index());
}

std::vector<double> Trajectory::channel(Channel c) const {
  std::vector<double> out;
  out.reserve(outputs.size());
  for (const auto& y : outputs) out.push_back(y[c]);
  return out;
}

namespace {

// Number of dt steps in `span`; throws unless span is an integer multiple.
std::size_t aligned_steps(double span, double dt, const char* what) {
  const double q = span / dt;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-6) {
    std::ostringstream os;
    os << what << " (" << span << " s) is not an integer multiple of dt (" << dt << " s)";
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(r);
}

struct Rk4 {
  template <typename F>
  static StateVector step(const F& f, const StateVector& x, double h) {
    const StateVector k1 = f(x);
    const StateVector k2 = f(x + 0.5 * h * k1);
    const StateVector k3 = f(x + 0.5 * h * k2);
    const StateVector k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

constexpr double kDivergenceBound = 1e6;

}  // namespace

Trajectory simulate(const StateSpace& ss, Controller controller, const ScenarioSpec& spec) {
  spec.validate();
  const double dt = spec.dt;
  const std::size_t steps = aligned_steps(spec.horizon, dt, "horizon");
  aligned_steps(spec.road.step_time, dt, "step_time");
  if (spec.road.kind == RoadKind::kBump) aligned_steps(spec.road.pulse_width, dt, "pulse_width");
  if (spec.road.has_noise()) aligned_steps(spec.road.noise_sample_time, dt, "noise_sample_time");

  const Variant variant = variant_of(controller);
  if (auto* pid = std::get_if<DualLoopPid>(&controller)) {
    pid->motion.gains.validate();
    pid->travel.gains.validate();
    pid->reset();
  }
  if (auto* lqr = std::get_if<LqrController>(&controller)) {
    if (!lqr->K.allFinite()) throw std::invalid_argument("simulate: non-finite LQR gain");
  }

  const std::size_t n = steps + 1;
  const std::vector<double> road = sample_road(spec.road, dt, n);

  Trajectory traj;
  traj.variant = to_string(variant);
  traj.scenario = spec.name;
  traj.step_time = spec.road.step_time;
  traj.step_amplitude = spec.road.step_amplitude;
  traj.last_event_time = last_road_event(spec.road, spec.horizon);
  {
    RoadSignal clean = spec.road;
    if (clean.kind == RoadKind::kStepPlusNoise) clean.kind = RoadKind::kStep;
    traj.road_asymptote = road_value(clean, spec.horizon).z_r;
  }
  traj.t.reserve(n);
  traj.x.reserve(n);
  traj.f_a.reserve(n);
  traj.z_r.reserve(n);
  traj.outputs.reserve(n);

  const Eigen::Matrix4d& A = ss.A;
  const Eigen::Vector4d b_road = ss.road_column();
  const Eigen::Vector4d b_force = ss.force_column();

  Eigen::Matrix4d A_lqr = A;
  if (auto* lqr = std::get_if<LqrController>(&controller)) A_lqr = A - b_force * lqr->K;

  StateVector x = StateVector::Zero();
  double z_prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double z = road[k];
    if (z != z_prev) {
      x += b_road * (z - z_prev);
      z_prev = z;
    }

    double force = 0.0;
    switch (variant) {
      case Variant::kPassive:
        break;
      case Variant::kLqr:
        force = -(std::get<LqrController>(controller).K * x)(0);
        break;
      case Variant::kPid: {
        auto& pid = std::get<DualLoopPid>(controller);
        if (pid.motion_tracks_road) pid.r_motion = z;
        const OutputChannels measured = evaluate_outputs(ss, x, Eigen::Vector2d::Zero(), z);
        force = dual_loop_force(pid, measured, dt);
        break;
      }
    }

    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.f_a.push_back(force);
    traj.z_r.push_back(z);
    traj.outputs.push_back(evaluate_outputs(ss, x, Eigen::Vector2d(0.0, force), z));

    if (k + 1 == n) break;

    if (variant == Variant::kLqr) {
      x = Rk4::step([&](const StateVector& y) -> StateVector { return A_lqr * y; }, x, dt);
    } else {
      const Eigen::Vector4d forcing = b_force * force;
      x = Rk4::step([&](const StateVector& y) -> StateVector { return A * y + forcing; }, x, dt);
    }
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound) {
      std::ostringstream os;
      os << "simulation diverged (variant " << traj.variant << ", scenario " << spec.name
         << ") after t = " << t << " s";
      throw SimulationDiverged(os.str(), k);
    }
  }
  return traj;
}

DualLoopPid PidSettings::make_controller() const {
  DualLoopPid ctl = make_dual_loop(motion, travel);
  ctl.motion.enabled = motion_enabled;
  ctl.travel.enabled = travel_enabled;
  ctl.r_motion = r_motion;
  ctl.r_travel = r_travel;
  ctl.motion_tracks_road = motion_tracks_road;
  ctl.force_limit = force_limit;
  return ctl;
}

ExperimentSetup ExperimentSetup::reference_defaults() {
  ExperimentSetup setup;
  const ReferencePidGains gains = reference_pid_gains();
  setup.pid.motion = gains.motion;
  setup.pid.travel = gains.travel;
  return setup;
}

LqrDesign design_nominal_lqr(const ExperimentSetup& setup) {
  const StateSpace ss = assemble_state_space(setup.params);
  return solve_care(ss.A, ss.force_column(), setup.weights);
}

std::vector<Trajectory> run_matrix(const ExperimentSetup& setup, const Eigen::RowVector4d& K,
                                   const std::vector<ScenarioSpec>& scenarios,
                                   const std::vector<Variant>& variants) {
  if (scenarios.empty() || variants.empty()) {
    throw std::invalid_argument("run_matrix: scenario and variant lists must be non-empty");
  }
  std::vector<Trajectory> out;
  out.reserve(scenarios.size() * variants.size());
  for (const ScenarioSpec& spec : scenarios) {
    const StateSpace ss = assemble_state_space(apply_uncertainty(setup.params, spec));
    for (Variant v : variants) {
      Controller controller;
      switch (v) {
        case Variant::kPassive:
          controller = PassiveController{};
          break;
        case Variant::kPid:
          controller = setup.pid.make_controller();
          break;
        case Variant::kLqr:
          controller = LqrController{K};
          break;
      }
      try {
        out.push_back(simulate(ss, std::move(controller), spec));
      } catch (const std::exception& e) {
        throw std::runtime_error("run_matrix [variant " + to_string(v) + ", scenario " +
                                 spec.name + "]: " + e.what());
      }
    }
  }
  return out;
}

std::vector<Trajectory> run_matrix(const ExperimentSetup& setup,
                                   const std::vector<ScenarioSpec>& scenarios,
                                   const std::vector<Variant>& variants) {
  Eigen::RowVector4d K = Eigen::RowVector4d::Zero();
  for (Variant v : variants) {
    if (v == Variant::kLqr) K = design_nominal_lqr(setup).K;
  }
  return run_matrix(setup, K, scenarios, variants);
}

}  // namespace qcar
