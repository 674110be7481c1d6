#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qcar/config.hpp"
#include "qcar/csv.hpp"
#include "qcar/runner.hpp"

namespace {

qcar::RunConfig load_or_default(const std::string& path) {
  return path.empty() ? qcar::parse_config("{}") : qcar::load_config(path);
}

void write_or_print(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path p(out);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quarter-car suspension experiments: passive, dual-loop PID and LQR"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string emit;
  std::optional<int> seed_ensemble;
  std::optional<double> dt;
  std::optional<double> horizon;
  auto* run = app.add_subcommand("run", "Run the full scenario matrix and write artifacts");
  run->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--emit", emit, "Comma list of polezero,roads,trajectories,tables,design_audit");
  run->add_option("--seed-ensemble", seed_ensemble, "Number of seeds for noise scenarios")
      ->check(CLI::PositiveNumber);
  run->add_option("--dt", dt, "Integration step for every scenario [s]")->check(CLI::PositiveNumber);
  run->add_option("--horizon", horizon, "Simulation horizon for every scenario [s]")
      ->check(CLI::PositiveNumber);

  std::string variant = "all";
  std::string analyze_config;
  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Pole-zero maps of the nominal closed loops");
  analyze->add_option("--variant", variant, "passive, pid, lqr or all")
      ->check(CLI::IsMember({"passive", "pid", "lqr", "all"}));
  analyze->add_option("--config", analyze_config, "JSON configuration file")->check(CLI::ExistingFile);
  analyze->add_option("--out", analyze_out, "Write CSV here instead of stdout");

  std::string synth_config;
  std::string synth_out;
  auto* synthesize = app.add_subcommand("synthesize", "LQR design audit as JSON");
  synthesize->add_option("--config", synth_config, "JSON configuration file")->check(CLI::ExistingFile);
  synthesize->add_option("--out", synth_out, "Write JSON here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      qcar::RunConfig cfg = load_or_default(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!emit.empty()) cfg.emit = qcar::parse_emit_list(emit);
      if (seed_ensemble) cfg.set_seed_ensemble(*seed_ensemble);
      for (auto& s : cfg.scenarios) {
        if (dt) s.dt = *dt;
        if (horizon) s.horizon = *horizon;
      }
      cfg.validate();
      const qcar::RunReport report = qcar::run_all(cfg);
      std::cout << report.summary;
      std::cout << "\nartifacts: " << report.manifest.size() << " files in " << cfg.output_dir.string()
                << " (exit " << report.exit_code << ")\n";
      return report.exit_code;
    }
    if (*analyze) {
      const qcar::RunConfig cfg = load_or_default(analyze_config);
      std::vector<qcar::Variant> variants(qcar::kAllVariants.begin(), qcar::kAllVariants.end());
      if (variant != "all") variants = {qcar::variant_from_string(variant)};
      write_or_print(analyze_out, qcar::pole_zero_csv(qcar::analyze(cfg.setup, variants)));
      return 0;
    }
    if (*synthesize) {
      const qcar::RunConfig cfg = load_or_default(synth_config);
      write_or_print(synth_out, qcar::design_audit_json(qcar::design_nominal_lqr(cfg.setup)));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
