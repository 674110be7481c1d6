// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "qcar/config.hpp"
#include "qcar/response_metrics.hpp"
#include "qcar/runner.hpp"
#include "qcar/signals.hpp"
#include "qcar/simulation.hpp"

using namespace qcar;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kTravelPeak = 0.0387, kTravelPeakRel = 0.20;
constexpr double kPassiveSettling = 1.451, kSettlingAbs = 0.25;
constexpr double kVarLo = 0.9e-4, kVarHi = 1.1e-4;
constexpr double kResidualTol = 1e-8, kGainRel = 1e-6;
constexpr double kExpmRel = 1e-8;
constexpr double kRefineRel = 1e-4, kMinOrder = 3.5;
constexpr double kEnergyRel = 1e-6;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("criterion %2d %-28s %s  %s\n", id, name.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double peak_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ScenarioSpec step_spec(double dt, double horizon = 3.0) {
  ScenarioSpec s;
  s.dt = dt;
  s.horizon = horizon;
  return s;
}

const MetricsTable* table_of(const RunReport& r, const std::string& scenario, Channel c) {
  for (const auto& t : r.tables)
    if (t.scenario == scenario && t.channel == c) return &t;
  return nullptr;
}

}  // namespace

int main() {
  const StateSpace plant = assemble_state_space({});
  const ExperimentSetup setup = ExperimentSetup::reference_defaults();
  const fs::path root = fs::temp_directory_path() / "qcar_acceptance";
  fs::remove_all(root);

  // Full default configuration, run twice (criteria 1, 4-6, 13).
  RunConfig cfg = parse_config("{}");
  cfg.output_dir = root / "run_a";
  const RunReport run = run_all(cfg);
  cfg.output_dir = root / "run_b";
  const RunReport rerun = run_all(cfg);

  // 1
  {
    bool ok = run.failures.empty();
    double worst = -1e300;
    for (const auto& s : run.stability) {
      if (s.plant != "nominal") continue;
      for (const auto& p : s.poles) worst = std::max(worst, p.real());
      ok = ok && s.verdict == Stability::kStable;
    }
    report(1, "stability", ok, fmt("max Re over nominal closed loops = %.4g", worst));
  }

  const Trajectory passive = simulate(plant, PassiveController{}, step_spec(1e-4));

  // 2
  {
    const double peak = peak_abs(passive.channel(Channel::kSuspensionTravel));
    const bool ok = std::abs(peak - kTravelPeak) <= kTravelPeakRel * kTravelPeak;
    report(2, "passive travel peak", ok, fmt("peak |travel| = %.5f m, target %.4f +/- 20%%", peak, kTravelPeak));
  }

  // 3
  {
    const double band = 0.02;
    const TimeResponseMetrics m = compute_metrics(passive, Channel::kSuspensionTravel, band,
                                                  ReferenceMode::kFinalWindowMean);
    const bool ok = std::abs(m.settling_time - kPassiveSettling) <= kSettlingAbs;
    report(3, "passive settling", ok, fmt("settling = %.4f s, target %.3f +/- %.2f", m.settling_time,
                                         kPassiveSettling, kSettlingAbs));
  }

  auto ordering_line = [&](const std::string& kind, const std::vector<std::string>& scenarios,
                           std::vector<Channel> channels) {
    int held = 0, total = 0;
    std::string misses;
    for (const auto& sc : scenarios) {
      for (Channel c : channels) {
        const MetricsTable* t = table_of(run, sc, c);
        const bool ok = t && (kind == "settling" ? settling_ordered(*t) : overshoot_ordered(*t));
        ++total;
        held += ok ? 1 : 0;
        if (!ok) misses += " " + sc + "/" + std::string(to_string(c));
      }
    }
    return std::make_pair(held == total, std::to_string(held) + "/" + std::to_string(total) +
                                             " hold" + (misses.empty() ? "" : "; misses:" + misses));
  };
  const std::vector<Channel> all(kAllChannels.begin(), kAllChannels.end());
  const std::vector<Channel> body = {Channel::kSprungMassAcceleration, Channel::kSprungMassMotion};

  // 4
  {
    auto [ok, d] = ordering_line("settling", {"nominal", "uncertainty", "noise"}, all);
    report(4, "settling ordering", ok, d);
  }
  // 5
  {
    auto [ok, d] = ordering_line("overshoot", {"nominal", "uncertainty", "noise"}, body);
    report(5, "overshoot ordering", ok, d);
  }
  // 6
  {
    auto [s_ok, s_d] = ordering_line("settling", {"uncertainty"}, all);
    auto [o_ok, o_d] = ordering_line("overshoot", {"uncertainty"}, body);
    bool hurwitz = false;
    double re = 0;
    for (const auto& s : run.stability) {
      if (s.plant == "uncertainty" && s.variant == Variant::kLqr) {
        hurwitz = s.verdict == Stability::kStable;
        re = -1e300;
        for (const auto& p : s.poles) re = std::max(re, p.real());
      }
    }
    report(6, "uncertainty robustness", s_ok && o_ok && hurwitz,
           fmt("LQR max Re = %.4g; ", re) + "settling " + s_d + "; overshoot " + o_d);
  }

  // 7
  {
    RoadSignal sig;
    sig.kind = RoadKind::kStepPlusNoise;
    double sum = 0, sq = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double v = noise_sample(sig, i);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n, var = (sq - n * mean * mean) / (n - 1);
    report(7, "noise variance", var >= kVarLo && var <= kVarHi, fmt("sample variance = %.5g", var));
  }

  // 8
  {
    const LqrDesign d = design_nominal_lqr(setup);
    const auto nk = oracle::newton_kleinman(plant.A, plant.force_column(), setup.weights.Q,
                                            setup.weights.R, true);
    const double rel = (d.K - nk.K).norm() / nk.K.norm();
    report(8, "riccati", d.residual_norm <= kResidualTol && rel <= kGainRel,
           fmt("residual = %.3g, |K - K_nk|/|K_nk| = %.3g", d.residual_norm, rel));
  }

  // 9
  {
    const StateVector jump = plant.road_column() * passive.step_amplitude;
    double scale = 0.0, worst = 0.0;
    for (const auto& x : passive.x) scale = std::max(scale, x.cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < passive.size(); ++k) {
      const double tau = passive.t[k] - passive.step_time;
      const StateVector exact =
          tau < 0 ? StateVector::Zero().eval() : StateVector(oracle::expm(plant.A * tau) * jump);
      worst = std::max(worst, (passive.x[k] - exact).cwiseAbs().maxCoeff() / scale);
    }
    report(9, "matrix exponential", worst <= kExpmRel, fmt("max relative state error = %.3g", worst));
  }

  // 10: peak change under halving at the default step, and the order from
  // sup-norm differences on the common coarse grid.
  {
    const Eigen::RowVector4d K = design_nominal_lqr(setup).K;
    double worst_peak = 0.0, worst_order = 1e300;
    for (const Controller& c : {Controller{PassiveController{}}, Controller{LqrController{K}}}) {
      const Trajectory h1 = simulate(plant, c, step_spec(1e-4));
      const Trajectory h2 = simulate(plant, c, step_spec(5e-5));
      std::vector<Trajectory> ladder;
      for (double h : {1e-3, 5e-4, 2.5e-4}) ladder.push_back(simulate(plant, c, step_spec(h)));
      for (Channel ch : kAllChannels) {
        const double a = peak_abs(h1.channel(ch)), b = peak_abs(h2.channel(ch));
        worst_peak = std::max(worst_peak, std::abs(a - b) / b);
        const auto y0 = ladder[0].channel(ch), y1 = ladder[1].channel(ch), y2 = ladder[2].channel(ch);
        double e01 = 0.0, e12 = 0.0;
        for (std::size_t k = 0; k < y0.size(); ++k) {
          e01 = std::max(e01, std::abs(y0[k] - y1[2 * k]));
          e12 = std::max(e12, std::abs(y1[2 * k] - y2[4 * k]));
        }
        worst_order = std::min(worst_order, std::log2(e01 / e12));
      }
    }
    report(10, "rk4 convergence", worst_peak < kRefineRel && worst_order >= kMinOrder,
           fmt("max peak change = %.3g, min observed order = %.3f (passive, lqr)", worst_peak, worst_order));
  }

  // 11
  {
    SuspensionParams p;
    p.b_s = p.b_us = 0.0;
    ScenarioSpec s = step_spec(1e-4, 1.0);
    s.road.step_time = 0.0;
    const Trajectory tr = simulate(assemble_state_space(p), PassiveController{}, s);
    auto energy = [&](const StateVector& x) {
      return 0.5 * (p.m_s * x[1] * x[1] + p.m_us * x[3] * x[3] + p.k_s * x[0] * x[0] + p.k_us * x[2] * x[2]);
    };
    const double e0 = energy(tr.x.front());
    double worst = 0.0;
    for (const auto& x : tr.x) worst = std::max(worst, std::abs(energy(x) - e0) / e0);
    report(11, "energy conservation", worst <= kEnergyRel, fmt("max relative drift = %.3g", worst));
  }

  // 12
  {
    const double dt = 1e-3;
    std::vector<double> t, decay, rise;
    for (int k = 0; k <= 30000; ++k) {
      t.push_back(k * dt);
      const double tau = std::max(0.0, t.back() - 1.0);
      decay.push_back(t.back() < 1.0 ? 0.0 : std::exp(-tau));
      rise.push_back(t.back() < 1.0 ? 0.0 : 1.0 - std::exp(-tau));
    }
    const auto md = compute_metrics(t, decay, 0.0, 1.0, 0.02);
    const auto mr = compute_metrics(t, rise, 1.0, 1.0, 0.02);
    const double es = std::abs(md.settling_time - (1.0 + std::log(50.0)));
    const double er = std::abs(mr.rise_time - (1.0 + std::log(10.0)));
    report(12, "metric closed forms", es <= dt && er <= dt,
           fmt("settling error = %.3g s, rise error = %.3g s, grid %.0e s", es, er, dt));
  }

  // 13
  {
    std::size_t files = 0, differing = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "run_a")) {
      if (!e.is_regular_file()) continue;
      const fs::path rel = fs::relative(e.path(), root / "run_a");
      ++files;
      differing += slurp(e.path()) != slurp(root / "run_b" / rel) ? 1 : 0;
    }
    const bool ok = files > 0 && differing == 0 && run.manifest.size() == rerun.manifest.size();
    report(13, "determinism", ok,
           std::to_string(files) + " files compared, " + std::to_string(differing) + " differ");
  }

  fs::remove_all(root);
  std::printf("%d criteria failed\n", failures);
  return failures;
}
