#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcar/config.hpp"
#include "qcar/linear_analysis.hpp"
#include "qcar/lqr_synthesis.hpp"
#include "qcar/response_metrics.hpp"

namespace qcar {

/// Published row for one variant of one metric table.
struct BenchmarkRow {
  Variant variant;
  double rise_time;
  double overshoot;
  double settling_time;
};

/// Published table for a default scenario family ("nominal", "uncertainty",
/// "noise") and channel, or nullptr if none exists.
const std::vector<BenchmarkRow>* benchmark_rows(std::string_view scenario, Channel channel);

/// settling(LQR) < settling(PID) < settling(passive)
bool settling_ordered(const MetricsTable& table);
/// |overshoot(LQR)| < min(|overshoot(PID)|, |overshoot(passive)|)
bool overshoot_ordered(const MetricsTable& table);

struct StabilityRow {
  std::string plant;  ///< scenario whose plant was closed
  Variant variant;
  std::vector<Complex> poles;
  Stability verdict;
};

struct OrderingCheck {
  std::string kind;  ///< "settling" or "overshoot"
  std::string scenario;
  Channel channel;
  bool passed;
};

struct StageFailure {
  std::string stage;
  std::string variant;
  std::string scenario;
  std::string message;
};

struct ManifestEntry {
  std::string path;  ///< relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunReport {
  std::optional<LqrDesign> design;
  std::vector<PoleZeroMap> pole_zero;
  std::vector<StabilityRow> stability;
  std::vector<MetricsTable> tables;  ///< ensemble means for noisy scenarios
  std::vector<OrderingCheck> orderings;
  std::vector<StageFailure> failures;
  std::vector<ManifestEntry> manifest;
  std::string summary;
  int exit_code = 0;
};

/// synthesis -> analysis -> simulation -> metrics -> artifacts + manifest.
/// Stage errors are recorded and the remaining stages continue where their
/// inputs exist. Nonzero exit on any failure, unstable verdict, or Riccati
/// residual above tolerance.
RunReport run_all(const RunConfig& cfg);

/// Pole-zero maps of the three nominal closed loops, one per channel.
std::vector<PoleZeroMap> analyze(const ExperimentSetup& setup, const std::vector<Variant>& variants);

std::string sha256_hex(std::string_view data);

}  // namespace qcar
