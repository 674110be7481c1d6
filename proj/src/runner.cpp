#include "qcar/runner.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "qcar/csv.hpp"

namespace qcar {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr Variant kP = Variant::kPassive;
constexpr Variant kI = Variant::kPid;
constexpr Variant kL = Variant::kLqr;

// Rise/overshoot/settling as published for the default scenarios.
const std::map<std::pair<std::string, Channel>, std::vector<BenchmarkRow>>& benchmarks() {
  static const std::map<std::pair<std::string, Channel>, std::vector<BenchmarkRow>> table = {
      {{"nominal", Channel::kSuspensionTravel},
       {{kP, 1.29, 0.0387, 1.451}, {kI, 1.30, 0.038, 1.377}, {kL, 1.15, -0.047, 1.21}}},
      {{"nominal", Channel::kSprungMassAcceleration},
       {{kP, 1.216, -55.1, 1.378}, {kI, 1.174, -56.1, 1.238}, {kL, 1.151, -47.54, 1.191}}},
      {{"nominal", Channel::kSprungMassMotion},
       {{kP, 1.138, 0.0567, 1.428}, {kI, 1.139, 0.0532, 1.346}, {kL, 1.15, 0.039, 1.204}}},
      {{"uncertainty", Channel::kSuspensionTravel},
       {{kP, 1.323, 0.0365, 1.507}, {kI, 1.329, 0.0356, 1.406}, {kL, 1.172, -0.0467, 1.211}}},
      {{"uncertainty", Channel::kSprungMassAcceleration},
       {{kP, 1.241, -43.83, 1.428}, {kI, 1.181, -48.61, 1.245}, {kL, 1.161, -39.96, 1.222}}},
      {{"uncertainty", Channel::kSprungMassMotion},
       {{kP, 1.307, 0.0517, 1.491}, {kI, 1.297, 0.050, 1.387}, {kL, 1.206, 0.037, 1.198}}},
      {{"noise", Channel::kSuspensionTravel},
       {{kP, 1.291, 0.038, 2.783}, {kI, 1.363, 0.037, 2.777}, {kL, 1.159, -0.047, 2.578}}},
      {{"noise", Channel::kSprungMassAcceleration},
       {{kP, 1.835, -55.01, 2.738}, {kI, 1.733, -56.15, 2.731}, {kL, 1.732, -47.71, 2.727}}},
      {{"noise", Channel::kSprungMassMotion},
       {{kP, 1.270, 0.0577, 2.901}, {kI, 1.202, 0.0543, 2.888}, {kL, 1.164, 0.0407, 2.872}}},
  };
  return table;
}

Controller make_controller(const ExperimentSetup& setup, const Eigen::RowVector4d& K, Variant v) {
  switch (v) {
    case Variant::kPassive:
      return PassiveController{};
    case Variant::kPid:
      return setup.pid.make_controller();
    case Variant::kLqr:
      return LqrController{K};
  }
  return PassiveController{};
}

ClosedLoopSystem close_loop(const StateSpace& ss, const ExperimentSetup& setup,
                            const Eigen::RowVectorXd& K, Variant v) {
  switch (v) {
    case Variant::kPassive:
      return open_loop(ss);
    case Variant::kPid:
      return close_loop_pid(ss, setup.pid);
    case Variant::kLqr:
      return close_loop_lqr(ss, K);
  }
  return open_loop(ss);
}

std::string file_stem(const std::string& scenario, Channel channel) {
  return scenario + "_" + std::string(to_string(channel));
}

std::string rel_dev(double computed, double published) {
  if (published == 0.0) return "n/a";
  std::ostringstream os;
  os << std::showpos << std::fixed << std::setprecision(1)
     << 100.0 * (computed - published) / std::fabs(published) << "%";
  return os.str();
}

class ArtifactWriter {
 public:
  ArtifactWriter(fs::path root, RunReport& report) : root_(std::move(root)), report_(report) {}

  void write(const std::string& rel, const std::string& content) {
    const fs::path path = root_ / rel;
    try {
      fs::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
      out << content;
      out.close();
      if (!out) throw std::runtime_error("write to " + path.string() + " failed");
      report_.manifest.push_back({rel, sha256_hex(content), content.size()});
    } catch (const std::exception& e) {
      report_.failures.push_back({"artifacts", "", "", rel + ": " + e.what()});
    }
  }

 private:
  fs::path root_;
  RunReport& report_;
};

std::string build_summary(const RunConfig& cfg, const RunReport& r, double tol) {
  std::ostringstream os;
  os << "== synthesis\n";
  if (r.design) {
    os << "K = [";
    for (Eigen::Index i = 0; i < r.design->K.size(); ++i) {
      os << (i ? ", " : "") << format_number(r.design->K[i]);
    }
    os << "]\nresidual = " << format_number(r.design->residual_norm)
       << (r.design->residual_norm <= tol ? " (ok)" : " (ABOVE TOLERANCE)") << "\n";
  } else {
    os << "no design\n";
  }

  os << "\n== stability (margin " << format_number(cfg.stability_margin) << ")\n";
  for (const auto& s : r.stability) {
    os << std::left << std::setw(14) << s.plant << std::setw(9) << to_string(s.variant)
       << std::setw(9) << to_string(s.verdict) << "max Re = ";
    double worst = -INFINITY;
    for (const auto& p : s.poles) worst = std::max(worst, p.real());
    os << format_number(worst) << "\n";
  }

  os << "\n== orderings\n";
  for (const char* kind : {"settling", "overshoot"}) {
    int pass = 0, total = 0;
    for (const auto& o : r.orderings) {
      if (o.kind != kind) continue;
      ++total;
      pass += o.passed;
      os << (o.passed ? "PASS " : "FAIL ") << kind << " " << o.scenario << "/" << to_string(o.channel)
         << "\n";
    }
    os << kind << ": " << pass << "/" << total << " hold\n";
  }
  bool perturbed_hurwitz = true;
  bool any_perturbed = false;
  for (const auto& s : r.stability) {
    if (s.variant == Variant::kLqr && s.plant != "nominal") {
      any_perturbed = true;
      perturbed_hurwitz = perturbed_hurwitz && s.verdict == Stability::kStable;
    }
  }
  if (any_perturbed) {
    os << (perturbed_hurwitz ? "PASS" : "FAIL") << " nominal LQR gain stabilizes every perturbed plant\n";
  }

  os << "\n== metrics (computed vs published)\n";
  for (const auto& t : r.tables) {
    os << "\n" << t.scenario << " / " << to_string(t.channel) << "\n";
    os << metrics_text(t);
    const auto* bench = benchmark_rows(t.scenario, t.channel);
    if (!bench) continue;
    os << std::left << std::setw(11) << "published" << std::setw(12) << "rise" << std::setw(12)
       << "overshoot" << std::setw(12) << "settling" << "deviation (rise, overshoot, settling)\n";
    for (const auto& b : *bench) {
      const auto& m = t.at(b.variant);
      os << std::left << std::setw(11) << to_string(b.variant) << std::setw(12)
         << format_number(b.rise_time) << std::setw(12) << format_number(b.overshoot) << std::setw(12)
         << format_number(b.settling_time) << rel_dev(m.rise_time, b.rise_time) << ", "
         << rel_dev(m.overshoot, b.overshoot) << ", " << rel_dev(m.settling_time, b.settling_time)
         << "\n";
    }
  }

  if (!r.failures.empty()) {
    os << "\n== failures\n";
    for (const auto& f : r.failures) {
      os << "[" << f.stage << "]";
      if (!f.variant.empty()) os << " variant=" << f.variant;
      if (!f.scenario.empty()) os << " scenario=" << f.scenario;
      os << ": " << f.message << "\n";
    }
  }
  return os.str();
}

}  // namespace

const std::vector<BenchmarkRow>* benchmark_rows(std::string_view scenario, Channel channel) {
  const auto& all = benchmarks();
  const auto it = all.find({std::string(scenario), channel});
  return it == all.end() ? nullptr : &it->second;
}

bool settling_ordered(const MetricsTable& t) {
  return t.at(kL).settling_time < t.at(kI).settling_time &&
         t.at(kI).settling_time < t.at(kP).settling_time;
}

bool overshoot_ordered(const MetricsTable& t) {
  const double lqr = std::fabs(t.at(kL).overshoot);
  return lqr < std::min(std::fabs(t.at(kI).overshoot), std::fabs(t.at(kP).overshoot));
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

std::vector<PoleZeroMap> analyze(const ExperimentSetup& setup, const std::vector<Variant>& variants) {
  const StateSpace ss = assemble_state_space(setup.params);
  Eigen::RowVectorXd K = Eigen::RowVectorXd::Zero(4);
  for (Variant v : variants) {
    if (v == Variant::kLqr) K = design_nominal_lqr(setup).K;
  }
  std::vector<PoleZeroMap> out;
  for (Variant v : variants) {
    const ClosedLoopSystem sys = close_loop(ss, setup, K, v);
    for (Channel c : kAllChannels) out.push_back(pole_zero_map(sys, c));
  }
  return out;
}

RunReport run_all(const RunConfig& cfg) {
  RunReport r;
  const ExperimentSetup& setup = cfg.setup;
  const auto wants = [&](const char* artifact) { return cfg.emit.count(artifact) > 0; };
  ArtifactWriter writer(cfg.output_dir, r);

  // synthesis
  try {
    r.design = design_nominal_lqr(setup);
  } catch (const std::exception& e) {
    r.failures.push_back({"synthesis", "lqr", "nominal", e.what()});
  }
  std::vector<Variant> variants = {Variant::kPassive, Variant::kPid};
  Eigen::RowVector4d K = Eigen::RowVector4d::Zero();
  if (r.design) {
    K = r.design->K;
    variants.push_back(Variant::kLqr);
    if (wants("design_audit")) writer.write("design_audit.json", design_audit_json(*r.design));
  }

  // analysis
  const StateSpace nominal = assemble_state_space(setup.params);
  for (Variant v : variants) {
    try {
      const ClosedLoopSystem sys = close_loop(nominal, setup, K, v);
      for (Channel c : kAllChannels) r.pole_zero.push_back(pole_zero_map(sys, c));
    } catch (const std::exception& e) {
      r.failures.push_back({"analysis", to_string(v), "nominal", e.what()});
    }
  }
  if (wants("polezero")) {
    for (const auto& m : r.pole_zero) {
      writer.write("polezero/" + to_string(m.variant) + "_" + std::string(to_string(m.channel)) + ".csv",
                   pole_zero_csv({m}));
    }
  }
  {
    std::map<std::string, bool> seen_plant;
    for (const auto& spec : cfg.scenarios) {
      const SuspensionParams p = apply_uncertainty(setup.params, spec);
      const bool is_nominal = p == setup.params;
      const std::string plant = is_nominal ? "nominal" : spec.name;
      if (seen_plant[plant]) continue;
      seen_plant[plant] = true;
      const StateSpace ss = assemble_state_space(p);
      for (Variant v : variants) {
        try {
          const auto poles = compute_poles(close_loop(ss, setup, K, v));
          r.stability.push_back({plant, v, poles, stability_verdict(poles, cfg.stability_margin)});
        } catch (const std::exception& e) {
          r.failures.push_back({"analysis", to_string(v), spec.name, e.what()});
        }
      }
    }
  }

  // simulation + metrics
  for (const auto& spec : cfg.scenarios) {
    const StateSpace ss = assemble_state_space(apply_uncertainty(setup.params, spec));
    const std::vector<std::uint64_t> seeds =
        spec.road.has_noise() ? cfg.seeds : std::vector<std::uint64_t>{spec.road.seed};
    std::map<Channel, std::vector<std::pair<std::uint64_t, MetricsTable>>> per_seed;
    bool complete = true;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      ScenarioSpec run = spec;
      run.road.seed = seeds[si];
      std::vector<Trajectory> trajs;
      for (Variant v : variants) {
        try {
          trajs.push_back(simulate(ss, make_controller(setup, K, v), run));
        } catch (const std::exception& e) {
          complete = false;
          if (si == 0 || !spec.road.has_noise()) {
            r.failures.push_back({"simulation", to_string(v), spec.name, e.what()});
          }
        }
      }
      if (si == 0) {
        if (wants("roads")) writer.write("roads/" + spec.name + ".csv", road_csv(run));
        if (wants("trajectories")) {
          for (const auto& tr : trajs) {
            writer.write("trajectories/" + spec.name + "_" + tr.variant + ".csv", trajectory_csv(tr));
          }
        }
      }
      if (trajs.size() != variants.size() || variants.size() != kAllVariants.size()) continue;
      for (Channel c : kAllChannels) {
        try {
          per_seed[c].emplace_back(seeds[si], metrics_table(trajs, c, spec.settling_band, spec.reference));
        } catch (const std::exception& e) {
          complete = false;
          r.failures.push_back({"metrics", "", spec.name, e.what()});
        }
      }
    }
    if (!complete) continue;
    for (Channel c : kAllChannels) {
      if (per_seed[c].empty()) continue;
      std::vector<MetricsTable> tables;
      for (auto& [seed, table] : per_seed[c]) tables.push_back(table);
      MetricsTable mean = tables.size() == 1 ? tables.front() : mean_table(tables);
      mean.scenario = spec.name;
      r.tables.push_back(mean);
      r.orderings.push_back({"settling", spec.name, c, settling_ordered(mean)});
      if (c != Channel::kSuspensionTravel) {
        r.orderings.push_back({"overshoot", spec.name, c, overshoot_ordered(mean)});
      }
      if (wants("tables")) {
        const std::string stem = "tables/" + file_stem(spec.name, c);
        writer.write(stem + ".csv", metrics_csv(mean));
        writer.write(stem + ".txt", metrics_text(mean));
        if (spec.road.has_noise()) writer.write(stem + "_per_seed.csv", metrics_per_seed_csv(per_seed[c]));
      }
    }
  }

  // verdict
  bool ok = r.failures.empty();
  if (r.design && !(r.design->residual_norm <= cfg.residual_tolerance)) ok = false;
  for (const auto& s : r.stability) ok = ok && s.verdict == Stability::kStable;
  r.exit_code = ok ? 0 : 1;

  r.summary = build_summary(cfg, r, cfg.residual_tolerance);
  writer.write("summary.txt", r.summary);

  ordered_json manifest;
  manifest["status"] = r.exit_code == 0 ? "ok" : "failed";
  manifest["files"] = ordered_json::array();
  for (const auto& m : r.manifest) {
    manifest["files"].push_back({{"path", m.path}, {"sha256", m.sha256}, {"bytes", m.bytes}});
  }
  manifest["failures"] = ordered_json::array();
  for (const auto& f : r.failures) {
    manifest["failures"].push_back(
        {{"stage", f.stage}, {"variant", f.variant}, {"scenario", f.scenario}, {"message", f.message}});
  }
  const std::string manifest_text = manifest.dump(2) + "\n";
  try {
    fs::create_directories(cfg.output_dir);
    std::ofstream(cfg.output_dir / "manifest.json", std::ios::binary | std::ios::trunc) << manifest_text;
  } catch (const std::exception& e) {
    r.failures.push_back({"artifacts", "", "", std::string("manifest.json: ") + e.what()});
    r.exit_code = 1;
  }
  return r;
}

}  // namespace qcar
