#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcar/vehicle_model.hpp"

namespace qcar {

enum class RoadKind {
  kStep,           ///< ideal step held after step_time
  kStepPlusNoise,  ///< step plus held band-limited white noise
  kBump,           ///< rectangular pulse of width pulse_width
};

std::string to_string(RoadKind kind);
RoadKind road_kind_from_string(const std::string& name);

struct RoadSignal {
  RoadKind kind = RoadKind::kStep;
  double step_amplitude = 0.08;   ///< m
  double step_time = 1.0;         ///< s
  double pulse_width = 0.1;       ///< s, kBump only
  double noise_power = 1e-5;      ///< m^2*s
  double noise_sample_time = 0.1; ///< s
  std::uint64_t seed = 0;

  bool has_noise() const { return kind == RoadKind::kStepPlusNoise && noise_power > 0.0; }
  void validate() const;
};

struct RoadSample {
  double z_r = 0.0;    ///< road displacement, m
  double noise = 0.0;  ///< held noise value of the containing interval, m
};

/// Gaussian sample for hold interval `index`, standard deviation
/// sqrt(noise_power / noise_sample_time). Pure function of (seed, index).
double noise_sample(const RoadSignal& sig, std::int64_t index);

/// Road displacement at time t >= 0.
RoadSample road_value(const RoadSignal& sig, double t);

/// Time of the last discontinuity of the road at or before `horizon`.
double last_road_event(const RoadSignal& sig, double horizon);

enum class ReferenceMode {
  kFinalWindowMean,  ///< mean over the final 10% of the horizon
  kAsymptote,        ///< analytic asymptote: 0, or step amplitude for motion
};

struct ScenarioSpec {
  std::string name = "nominal";
  RoadSignal road;
  double sprung_mass_scale = 1.0;
  /// Pins m_s directly (e.g. 281 kg) instead of scaling.
  std::optional<double> sprung_mass_override;
  double horizon = 3.0;      ///< s
  double dt = 1e-4;          ///< s
  double settling_band = 0.02;
  ReferenceMode reference = ReferenceMode::kFinalWindowMean;

  void validate() const;
};

/// Nominal step, +20% sprung mass step, and step-plus-noise scenarios with
/// their default horizons and settling bands.
std::vector<ScenarioSpec> default_scenarios();

/// Plant perturbation of the scenario: m_s scaled (or overridden), all other
/// parameters untouched. Controllers are not re-derived.
SuspensionParams apply_uncertainty(const SuspensionParams& params, const ScenarioSpec& spec);

/// Road displacement on the grid t_k = k * dt, k = 0..n-1. Each noise hold
/// interval is drawn once.
std::vector<double> sample_road(const RoadSignal& sig, double dt, std::size_t n);

}  // namespace qcar
