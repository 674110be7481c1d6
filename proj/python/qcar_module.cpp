#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qcar/config.hpp"
#include "qcar/csv.hpp"
#include "qcar/linear_analysis.hpp"
#include "qcar/lqr_synthesis.hpp"
#include "qcar/response_metrics.hpp"
#include "qcar/runner.hpp"
#include "qcar/simulation.hpp"

namespace py = pybind11;
using namespace qcar;

namespace {

ClosedLoopSystem closed_loop(const SuspensionParams& p, const std::string& variant) {
  const StateSpace ss = assemble_state_space(p);
  ExperimentSetup setup = ExperimentSetup::reference_defaults();
  setup.params = p;
  switch (variant_from_string(variant)) {
    case Variant::kPassive:
      return open_loop(ss);
    case Variant::kPid:
      return close_loop_pid(ss, setup.pid);
    case Variant::kLqr:
      return close_loop_lqr(ss, design_nominal_lqr(setup).K);
  }
  return open_loop(ss);
}

py::dict trajectory_dict(const Trajectory& tr) {
  const auto n = static_cast<Eigen::Index>(tr.size());
  Eigen::MatrixXd x(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = tr.x[static_cast<std::size_t>(i)].transpose();
  py::dict d;
  d["variant"] = tr.variant;
  d["scenario"] = tr.scenario;
  d["t"] = tr.t;
  d["x"] = x;
  d["f_a"] = tr.f_a;
  d["z_r"] = tr.z_r;
  for (Channel c : kAllChannels) d[py::str(std::string(to_string(c)))] = tr.channel(c);
  return d;
}

}  // namespace

PYBIND11_MODULE(_qcar, m) {
  m.doc() = "Quarter-car suspension: plant, LQR/PID design, simulation and metrics";

  py::class_<SuspensionParams>(m, "SuspensionParams")
      .def(py::init<>())
      .def_readwrite("b_s", &SuspensionParams::b_s)
      .def_readwrite("b_us", &SuspensionParams::b_us)
      .def_readwrite("k_s", &SuspensionParams::k_s)
      .def_readwrite("k_us", &SuspensionParams::k_us)
      .def_readwrite("m_s", &SuspensionParams::m_s)
      .def_readwrite("m_us", &SuspensionParams::m_us)
      .def("validate", &SuspensionParams::validate);

  py::class_<StateSpace>(m, "StateSpace")
      .def_readonly("A", &StateSpace::A)
      .def_readonly("B", &StateSpace::B)
      .def_readonly("C", &StateSpace::C)
      .def_readonly("D", &StateSpace::D);
  m.def("assemble_state_space", &assemble_state_space, py::arg("params") = SuspensionParams{});

  py::class_<LqrWeights>(m, "LqrWeights")
      .def(py::init<>())
      .def_readwrite("Q", &LqrWeights::Q)
      .def_readwrite("R", &LqrWeights::R);
  py::class_<LqrDesign>(m, "LqrDesign")
      .def_readonly("P", &LqrDesign::P)
      .def_readonly("K", &LqrDesign::K)
      .def_readonly("residual_norm", &LqrDesign::residual_norm)
      .def_readonly("closed_loop_poles", &LqrDesign::closed_loop_poles)
      .def("stability_margin", &LqrDesign::stability_margin);
  m.def("reference_weights", &reference_weights);
  m.def("solve_care", &solve_care, py::arg("A"), py::arg("b"), py::arg("weights"));

  py::class_<PidGains>(m, "PidGains")
      .def(py::init([](double kp, double ki, double kd, double n) { return PidGains{kp, ki, kd, n}; }),
           py::arg("k_p") = 0.0, py::arg("k_i") = 0.0,
           py::arg("k_d") = 0.0, py::arg("n_filter") = 1000.0)
      .def_readwrite("k_p", &PidGains::k_p)
      .def_readwrite("k_i", &PidGains::k_i)
      .def_readwrite("k_d", &PidGains::k_d)
      .def_readwrite("n_filter", &PidGains::n_filter);
  py::class_<PidState>(m, "PidState")
      .def(py::init<>())
      .def_readwrite("integral_accum", &PidState::integral_accum)
      .def_readwrite("deriv_state", &PidState::deriv_state)
      .def_readwrite("prev_error", &PidState::prev_error);
  m.def("pid_step", &pid_step, py::arg("gains"), py::arg("state"), py::arg("error"), py::arg("dt"));

  m.def(
      "poles",
      [](const std::string& variant, const SuspensionParams& p) {
        return compute_poles(closed_loop(p, variant));
      },
      py::arg("variant"), py::arg("params") = SuspensionParams{});
  m.def(
      "zeros",
      [](const std::string& variant, const std::string& channel, const SuspensionParams& p) {
        return compute_zeros(closed_loop(p, variant), channel_from_string(channel));
      },
      py::arg("variant"), py::arg("channel"), py::arg("params") = SuspensionParams{});

  m.def(
      "simulate_defaults",
      [](const std::string& scenario, double horizon, double dt) {
        const ExperimentSetup setup = ExperimentSetup::reference_defaults();
        for (ScenarioSpec spec : default_scenarios()) {
          if (spec.name != scenario) continue;
          if (horizon > 0) spec.horizon = horizon;
          if (dt > 0) spec.dt = dt;
          py::list out;
          for (const auto& tr : run_matrix(setup, {spec}, {kAllVariants.begin(), kAllVariants.end()})) {
            out.append(trajectory_dict(tr));
          }
          return out;
        }
        throw py::value_error("unknown scenario '" + scenario + "'");
      },
      py::arg("scenario") = "nominal", py::arg("horizon") = 0.0, py::arg("dt") = 0.0,
      "One trajectory dict per variant for a default scenario.");

  m.def(
      "metrics",
      [](const std::vector<double>& t, const std::vector<double>& y, double reference,
         double event_time, double band) {
        const auto r = compute_metrics(t, y, reference, event_time, band);
        return py::dict(py::arg("rise_time") = r.rise_time, py::arg("overshoot") = r.overshoot,
                        py::arg("settling_time") = r.settling_time,
                        py::arg("peak_deviation") = r.peak_deviation);
      },
      py::arg("t"), py::arg("y"), py::arg("reference"), py::arg("event_time"), py::arg("band") = 0.02);

  m.def(
      "run",
      [](const std::string& config_json, const std::string& out_dir) {
        RunConfig cfg = parse_config(config_json);
        cfg.output_dir = out_dir;
        const RunReport r = run_all(cfg);
        py::list files;
        for (const auto& f : r.manifest) files.append(f.path);
        return py::dict(py::arg("exit_code") = r.exit_code, py::arg("summary") = r.summary,
                        py::arg("files") = files);
      },
      py::arg("config_json"), py::arg("out_dir"));
}
