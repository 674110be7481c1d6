#include "qcar/csv.hpp"

#include <charconv>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qcar {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 as well
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, res.ptr);
}

namespace {

const char* unit_of(Channel c) {
  return c == Channel::kSprungMassAcceleration ? "m/s^2" : "m";
}

const char* pretty_variant(Variant v) {
  switch (v) {
    case Variant::kPassive:
      return "Passive";
    case Variant::kPid:
      return "PID-controlled active";
    case Variant::kLqr:
      return "LQR-controlled active";
  }
  return "?";
}

void metrics_fields(std::ostringstream& os, const MetricsTable& table, const MetricsRow& row) {
  const auto& m = row.metrics;
  os << to_string(row.variant) << ',' << format_number(m.rise_time) << ','
     << format_number(m.overshoot) << ',' << format_number(m.settling_time) << ','
     << format_number(m.band) << ',' << format_number(m.reference) << ','
     << to_string(table.reference_mode) << ',' << table.ensemble_size << '\n';
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t,x1,x2,x3,x4,f_a,z_r,travel,accel,motion\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& x = traj.x[k];
    const auto& y = traj.outputs[k];
    os << format_number(traj.t[k]) << ',' << format_number(x[0]) << ',' << format_number(x[1])
       << ',' << format_number(x[2]) << ',' << format_number(x[3]) << ','
       << format_number(traj.f_a[k]) << ',' << format_number(traj.z_r[k]) << ','
       << format_number(y.suspension_travel) << ',' << format_number(y.sprung_mass_acceleration)
       << ',' << format_number(y.sprung_mass_motion) << '\n';
  }
  return os.str();
}

std::string pole_zero_csv(const std::vector<PoleZeroMap>& maps) {
  std::ostringstream os;
  os << "variant,channel,kind,re,im\n";
  for (const auto& map : maps) {
    for (const auto& [kind, roots] : {std::pair{"pole", &map.poles}, std::pair{"zero", &map.zeros}}) {
      for (const Complex& z : *roots) {
        os << to_string(map.variant) << ',' << to_string(map.channel) << ',' << kind << ','
           << format_number(z.real()) << ',' << format_number(z.imag()) << '\n';
      }
    }
  }
  return os.str();
}

std::string road_csv(const ScenarioSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::llround(spec.horizon / spec.dt)) + 1;
  const std::vector<double> z = sample_road(spec.road, spec.dt, n);
  RoadSignal clean = spec.road;
  if (clean.kind == RoadKind::kStepPlusNoise) clean.kind = RoadKind::kStep;
  std::ostringstream os;
  os << "t,z_r,noise\n";
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    os << format_number(t) << ',' << format_number(z[k]) << ','
       << format_number(z[k] - road_value(clean, t).z_r) << '\n';
  }
  return os.str();
}

std::string metrics_csv(const MetricsTable& table) {
  std::ostringstream os;
  os << "variant,rise_s,overshoot,settling_s,band,reference,reference_mode,ensemble_size\n";
  for (const auto& row : table.rows) metrics_fields(os, table, row);
  return os.str();
}

std::string metrics_per_seed_csv(const std::vector<std::pair<std::uint64_t, MetricsTable>>& tables) {
  std::ostringstream os;
  os << "seed,variant,rise_s,overshoot,settling_s,band,reference,reference_mode,ensemble_size\n";
  for (const auto& [seed, table] : tables) {
    for (const auto& row : table.rows) {
      os << seed << ',';
      metrics_fields(os, table, row);
    }
  }
  return os.str();
}

std::string metrics_text(const MetricsTable& table) {
  std::ostringstream os;
  os << "Time response for " << to_string(table.channel) << " (scenario " << table.scenario << ")\n";
  os << "reference: " << to_string(table.reference_mode) << "; settling band +/-"
     << table.band * 100.0 << "% of peak deviation; rise at 90% of peak excursion";
  if (table.ensemble_size > 1) os << "; mean of " << table.ensemble_size << " seeds";
  os << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %14s %18s %18s\n", "Suspension type", "Rise time (s)",
                (std::string("Overshoot (") + unit_of(table.channel) + ")").c_str(),
                "Settling time (s)");
  os << line;
  for (const auto& row : table.rows) {
    std::snprintf(line, sizeof(line), "%-24s %14.4f %18.5g %18.4f\n", pretty_variant(row.variant),
                  row.metrics.rise_time, row.metrics.overshoot, row.metrics.settling_time);
    os << line;
  }
  return os.str();
}

std::string design_audit_json(const LqrDesign& design) {
  using nlohmann::ordered_json;
  ordered_json j;
  const auto n = design.P.rows();
  j["K"] = std::vector<double>(design.K.data(), design.K.data() + design.K.size());
  auto matrix = [n](const Eigen::MatrixXd& M) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<double> row(n);
      for (Eigen::Index k = 0; k < n; ++k) row[k] = M(i, k);
      rows.push_back(row);
    }
    return rows;
  };
  j["P"] = matrix(design.P);
  j["residual_norm"] = design.residual_norm;
  ordered_json poles = ordered_json::array();
  for (const Complex& p : design.closed_loop_poles) poles.push_back({{"re", p.real()}, {"im", p.imag()}});
  j["closed_loop_poles"] = poles;
  j["stability_margin"] = design.stability_margin();
  j["weights"] = {{"Q", matrix(design.weights.Q)}, {"R", design.weights.R}};
  return j.dump(2) + "\n";
}

}  // namespace qcar
