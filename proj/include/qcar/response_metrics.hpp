#pragma once

#include <span>
#include <string>
#include <vector>

#include "qcar/signals.hpp"
#include "qcar/simulation.hpp"

namespace qcar {

/// Rise, signed overshoot and settling of one channel of one run. Times are
/// absolute simulation times, so they include the quiet interval before the
/// road event.
struct TimeResponseMetrics {
  double rise_time = 0.0;
  double overshoot = 0.0;
  double settling_time = 0.0;
  double band = 0.02;
  double reference = 0.0;
  double peak_deviation = 0.0;  ///< max |y - reference| after the event
};

double steady_reference(const Trajectory& traj, Channel channel, ReferenceMode mode);

/// Core metric extraction on a sampled series.
///   d = y - reference, D = max |d| over t >= event_time
///   overshoot: d at the peak of |d|; for series whose level changes
///     (|reference - y0| > band * peak excursion) the signed extreme past the
///     reference in the direction of the change instead
///   rise: first t with |y - y0| >= 0.9 * peak excursion from y0
///   settling: last t with |d| > band * D
/// A flat series (D = 0) yields (event_time, 0, event_time).
TimeResponseMetrics compute_metrics(std::span<const double> t, std::span<const double> y,
                                    double reference, double event_time, double band);

TimeResponseMetrics compute_metrics(const Trajectory& traj, Channel channel, double band,
                                    ReferenceMode mode);

struct MetricsRow {
  Variant variant;
  TimeResponseMetrics metrics;
};

struct MetricsTable {
  std::string scenario;
  Channel channel = Channel::kSuspensionTravel;
  double band = 0.02;
  ReferenceMode reference_mode = ReferenceMode::kFinalWindowMean;
  int ensemble_size = 1;
  std::vector<MetricsRow> rows;  ///< passive, pid, lqr

  const TimeResponseMetrics& at(Variant v) const;
};

/// Rows ordered passive, PID, LQR. Expects exactly one trajectory per variant.
MetricsTable metrics_table(const std::vector<Trajectory>& trajs, Channel channel, double band,
                           ReferenceMode mode);

/// Element-wise mean over tables of the same scenario/channel (seed ensemble).
MetricsTable mean_table(const std::vector<MetricsTable>& tables);

std::string to_string(ReferenceMode mode);
ReferenceMode reference_mode_from_string(const std::string& name);

}  // namespace qcar
