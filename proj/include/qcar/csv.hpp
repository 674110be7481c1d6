#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcar/linear_analysis.hpp"
#include "qcar/response_metrics.hpp"
#include "qcar/simulation.hpp"

namespace qcar {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

/// Header + one row per sample: t,x1,x2,x3,x4,f_a,z_r,travel,accel,motion
std::string trajectory_csv(const Trajectory& traj);

/// Header + one row per root: variant,channel,kind,re,im
std::string pole_zero_csv(const std::vector<PoleZeroMap>& maps);

/// Header + samples: t,z_r,noise (step-only roads have noise 0)
std::string road_csv(const ScenarioSpec& spec);

/// variant,rise_s,overshoot,settling_s,band,reference,reference_mode,ensemble_size
std::string metrics_csv(const MetricsTable& table);

/// Same columns with a leading seed column, one block per seed.
std::string metrics_per_seed_csv(const std::vector<std::pair<std::uint64_t, MetricsTable>>& tables);

/// Aligned, human-readable table with the reference convention in the header.
std::string metrics_text(const MetricsTable& table);

/// JSON text with K, P, residual, closed-loop poles and weights.
std::string design_audit_json(const LqrDesign& design);

}  // namespace qcar
