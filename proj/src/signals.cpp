#include "qcar/signals.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace qcar {

std::string to_string(RoadKind kind) {
  switch (kind) {
    case RoadKind::kStep:
      return "step";
    case RoadKind::kStepPlusNoise:
      return "step_plus_noise";
    case RoadKind::kBump:
      return "bump";
  }
  return "unknown";
}

RoadKind road_kind_from_string(const std::string& name) {
  if (name == "step") return RoadKind::kStep;
  if (name == "step_plus_noise") return RoadKind::kStepPlusNoise;
  if (name == "bump") return RoadKind::kBump;
  throw std::invalid_argument("unknown road kind: " + name);
}

void RoadSignal::validate() const {
  if (!std::isfinite(step_amplitude)) throw std::invalid_argument("step_amplitude must be finite");
  if (!(step_time >= 0.0)) throw std::invalid_argument("step_time must be non-negative");
  if (kind == RoadKind::kBump && !(pulse_width > 0.0)) {
    throw std::invalid_argument("pulse_width must be positive");
  }
  if (!(noise_power >= 0.0)) throw std::invalid_argument("noise_power must be non-negative");
  if (kind == RoadKind::kStepPlusNoise && !(noise_sample_time > 0.0)) {
    throw std::invalid_argument("noise_sample_time must be positive");
  }
}

double noise_sample(const RoadSignal& sig, std::int64_t index) {
  if (!sig.has_noise()) return 0.0;
  const auto k = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(sig.seed), static_cast<std::uint32_t>(sig.seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(sig.noise_power / sig.noise_sample_time));
  return normal(engine);
}

namespace {

// Index of the hold interval containing t, robust to t landing a hair below
// an exact multiple of the sample time.
std::int64_t hold_index(double t, double sample_time) {
  const double q = t / sample_time;
  const double r = std::round(q);
  if (std::abs(q - r) < 1e-9) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(q));
}

bool at_or_after(double t, double event) { return t >= event - 1e-12 * std::max(1.0, event); }

}  // namespace

RoadSample road_value(const RoadSignal& sig, double t) {
  RoadSample out;
  switch (sig.kind) {
    case RoadKind::kStep:
    case RoadKind::kStepPlusNoise:
      out.z_r = at_or_after(t, sig.step_time) ? sig.step_amplitude : 0.0;
      break;
    case RoadKind::kBump:
      out.z_r = at_or_after(t, sig.step_time) && !at_or_after(t, sig.step_time + sig.pulse_width)
                    ? sig.step_amplitude
                    : 0.0;
      break;
  }
  if (sig.has_noise()) {
    out.noise = noise_sample(sig, hold_index(t, sig.noise_sample_time));
    out.z_r += out.noise;
  }
  return out;
}

double last_road_event(const RoadSignal& sig, double horizon) {
  double last = sig.step_time;
  if (sig.kind == RoadKind::kBump) last = sig.step_time + sig.pulse_width;
  if (sig.has_noise()) {
    last = std::max(last, hold_index(horizon, sig.noise_sample_time) * sig.noise_sample_time);
  }
  return last;
}

void ScenarioSpec::validate() const {
  road.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("scenario '" + name + "': dt must be positive");
  if (!(horizon > road.step_time)) {
    throw std::invalid_argument("scenario '" + name + "': horizon must exceed step_time");
  }
  if (!(settling_band > 0.0 && settling_band < 1.0)) {
    throw std::invalid_argument("scenario '" + name + "': settling_band must lie in (0, 1)");
  }
  if (!(sprung_mass_scale > 0.0)) {
    throw std::invalid_argument("scenario '" + name + "': sprung_mass_scale must be positive");
  }
  if (sprung_mass_override && !(*sprung_mass_override > 0.0)) {
    throw std::invalid_argument("scenario '" + name + "': sprung_mass_override must be positive");
  }
}

std::vector<ScenarioSpec> default_scenarios() {
  ScenarioSpec nominal;
  nominal.name = "nominal";

  ScenarioSpec uncertainty;
  uncertainty.name = "uncertainty";
  uncertainty.sprung_mass_scale = 1.2;

  ScenarioSpec noise;
  noise.name = "noise";
  noise.road.kind = RoadKind::kStepPlusNoise;
  noise.horizon = 10.0;
  noise.settling_band = 0.05;
  noise.reference = ReferenceMode::kAsymptote;

  return {nominal, uncertainty, noise};
}

SuspensionParams apply_uncertainty(const SuspensionParams& params, const ScenarioSpec& spec) {
  if (!(spec.sprung_mass_scale > 0.0)) {
    throw std::invalid_argument("sprung_mass_scale must be positive");
  }
  SuspensionParams out = params;
  out.m_s = spec.sprung_mass_override ? *spec.sprung_mass_override
                                      : params.m_s * spec.sprung_mass_scale;
  return out;
}

std::vector<double> sample_road(const RoadSignal& sig, double dt, std::size_t n) {
  RoadSignal deterministic = sig;
  deterministic.kind = sig.kind == RoadKind::kStepPlusNoise ? RoadKind::kStep : sig.kind;
  std::vector<double> z(n);
  std::int64_t cached_index = -1;
  double cached_value = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    z[k] = road_value(deterministic, t).z_r;
    if (sig.has_noise()) {
      const std::int64_t idx = hold_index(t, sig.noise_sample_time);
      if (idx != cached_index) {
        cached_index = idx;
        cached_value = noise_sample(sig, idx);
      }
      z[k] += cached_value;
    }
  }
  return z;
}

}  // namespace qcar
