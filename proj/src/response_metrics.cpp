#include "qcar/response_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcar {

std::string to_string(ReferenceMode mode) {
  return mode == ReferenceMode::kAsymptote ? "asymptote" : "final_window_mean";
}

ReferenceMode reference_mode_from_string(const std::string& name) {
  if (name == "asymptote") return ReferenceMode::kAsymptote;
  if (name == "final_window_mean") return ReferenceMode::kFinalWindowMean;
  throw std::invalid_argument("unknown reference mode: " + name);
}

double steady_reference(const Trajectory& traj, Channel channel, ReferenceMode mode) {
  if (traj.size() == 0) throw std::invalid_argument("steady_reference: empty trajectory");
  if (mode == ReferenceMode::kAsymptote) {
    // At rest the body sits on the road; travel and acceleration return to 0.
    return channel == Channel::kSprungMassMotion ? traj.road_asymptote : 0.0;
  }
  if (traj.t.back() - traj.last_event_time < 0.5 - 1e-9) {
    throw std::invalid_argument(
        "steady_reference: horizon must extend at least 0.5 s past the last road event");
  }
  const std::size_t n = traj.size();
  const auto first = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n - 1)));
  double sum = 0.0;
  for (std::size_t k = first; k < n; ++k) sum += traj.outputs[k][channel];
  return sum / static_cast<double>(n - first);
}

TimeResponseMetrics compute_metrics(std::span<const double> t, std::span<const double> y,
                                    double reference, double event_time, double band) {
  if (t.size() != y.size() || t.empty()) {
    throw std::invalid_argument("compute_metrics: time and value series must be equal, non-empty");
  }
  if (!(band > 0.0 && band < 1.0)) throw std::invalid_argument("compute_metrics: band must lie in (0, 1)");

  TimeResponseMetrics m;
  m.band = band;
  m.reference = reference;

  const double tol = 1e-9 * std::max(1.0, std::abs(event_time));
  std::size_t first = 0;
  while (first < t.size() && t[first] < event_time - tol) ++first;
  if (first == t.size()) {
    m.rise_time = m.settling_time = event_time;
    return m;
  }

  const double y0 = y.front();
  double peak_dev = 0.0;
  std::size_t peak_idx = first;
  double peak_exc = 0.0;
  for (std::size_t k = first; k < t.size(); ++k) {
    const double dev = std::abs(y[k] - reference);
    if (dev > peak_dev) {
      peak_dev = dev;
      peak_idx = k;
    }
    peak_exc = std::max(peak_exc, std::abs(y[k] - y0));
  }
  m.peak_deviation = peak_dev;
  if (peak_dev == 0.0) {
    m.rise_time = m.settling_time = event_time;
    return m;
  }

  const double net = reference - y0;
  if (std::abs(net) > band * peak_exc) {
    const double dir = net > 0.0 ? 1.0 : -1.0;
    double beyond = 0.0;
    for (std::size_t k = first; k < t.size(); ++k) beyond = std::max(beyond, dir * (y[k] - reference));
    m.overshoot = dir * beyond;
  } else {
    m.overshoot = y[peak_idx] - reference;
  }

  m.rise_time = t[first];
  for (std::size_t k = first; k < t.size(); ++k) {
    if (std::abs(y[k] - y0) >= 0.9 * peak_exc) {
      m.rise_time = t[k];
      break;
    }
  }

  const double limit = band * peak_dev;
  m.settling_time = t[first];
  for (std::size_t k = t.size(); k-- > first;) {
    if (std::abs(y[k] - reference) > limit) {
      m.settling_time = t[k];
      break;
    }
  }
  return m;
}

TimeResponseMetrics compute_metrics(const Trajectory& traj, Channel channel, double band,
                                    ReferenceMode mode) {
  const double reference = steady_reference(traj, channel, mode);
  const std::vector<double> y = traj.channel(channel);
  return compute_metrics(traj.t, y, reference, traj.step_time, band);
}

const TimeResponseMetrics& MetricsTable::at(Variant v) const {
  for (const auto& row : rows) {
    if (row.variant == v) return row.metrics;
  }
  throw std::out_of_range("metrics table has no row for variant " + to_string(v));
}

MetricsTable metrics_table(const std::vector<Trajectory>& trajs, Channel channel, double band,
                           ReferenceMode mode) {
  MetricsTable table;
  table.channel = channel;
  table.band = band;
  table.reference_mode = mode;
  for (Variant v : kAllVariants) {
    const std::string name = to_string(v);
    const auto it = std::find_if(trajs.begin(), trajs.end(),
                                 [&](const Trajectory& tr) { return tr.variant == name; });
    if (it == trajs.end()) throw std::invalid_argument("metrics_table: missing variant " + name);
    if (std::count_if(trajs.begin(), trajs.end(),
                      [&](const Trajectory& tr) { return tr.variant == name; }) != 1) {
      throw std::invalid_argument("metrics_table: duplicate variant " + name);
    }
    table.scenario = it->scenario;
    table.rows.push_back({v, compute_metrics(*it, channel, band, mode)});
  }
  return table;
}

MetricsTable mean_table(const std::vector<MetricsTable>& tables) {
  if (tables.empty()) throw std::invalid_argument("mean_table: no tables");
  MetricsTable out = tables.front();
  out.ensemble_size = static_cast<int>(tables.size());
  for (auto& row : out.rows) {
    TimeResponseMetrics sum{};
    sum.band = row.metrics.band;
    for (const auto& table : tables) {
      const TimeResponseMetrics& m = table.at(row.variant);
      sum.rise_time += m.rise_time;
      sum.overshoot += m.overshoot;
      sum.settling_time += m.settling_time;
      sum.reference += m.reference;
      sum.peak_deviation += m.peak_deviation;
    }
    const double n = static_cast<double>(tables.size());
    row.metrics.rise_time = sum.rise_time / n;
    row.metrics.overshoot = sum.overshoot / n;
    row.metrics.settling_time = sum.settling_time / n;
    row.metrics.reference = sum.reference / n;
    row.metrics.peak_deviation = sum.peak_deviation / n;
  }
  return out;
}

}  // namespace qcar
