#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcar/signals.hpp"
#include "qcar/simulation.hpp"

namespace qcar {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::set<std::string> kAllArtifacts = {"polezero", "roads", "trajectories", "tables",
                                                    "design_audit"};

struct RunConfig {
  ExperimentSetup setup = ExperimentSetup::reference_defaults();
  std::vector<ScenarioSpec> scenarios = default_scenarios();
  std::filesystem::path output_dir = "qcar_out";
  /// Seeds for noise scenarios; metrics are averaged over all of them.
  std::vector<std::uint64_t> seeds;
  std::set<std::string> emit = kAllArtifacts;
  double stability_margin = 0.0;
  double residual_tolerance = 1e-8;

  void set_seed_ensemble(int count);
  void validate() const;
};

/// Parses a JSON document. Missing fields keep their defaults; errors carry
/// the offending field path or the line of a syntax error.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

std::set<std::string> parse_emit_list(const std::string& csv);

}  // namespace qcar
