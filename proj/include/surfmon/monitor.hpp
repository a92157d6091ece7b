#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace surfmon {

// Z_t = (1 - lambda) Z_{t-1} + lambda x_t
struct EwmaState {
  double lambda = 0.1;
  double z = 0.0;
  std::int64_t t = 0;

  // Throws InvalidArgument unless 0 < lambda < 1 and z0 is finite.
  static EwmaState start(double lambda, double z0);
};

EwmaState ewma_update(const EwmaState& state, double x);

struct ControlLimits {
  double ucl = 0.0;
  double quantile = 0.95;
  std::size_t calibration_size = 0;
};

// Mean of the fault-free scores. Throws EmptyCalibrationSet.
double calibrate_z0(std::span<const double> fault_free_scores);

// ceil(q*n)-th order statistic: the smallest value whose ECDF reaches q.
// Throws EmptyCalibrationSet, or InvalidArgument unless 0 < q < 1.
ControlLimits calibrate_ucl(std::span<const double> values, double quantile);

// EWMA statistics Z_1..Z_n of a stream started at z0.
std::vector<double> ewma_series(std::span<const double> xs, double lambda, double z0);

struct TracePoint {
  std::int64_t t = 0;
  double x = 0.0;
  double z = 0.0;
  bool alarm = false;
};

struct MonitorTrace {
  std::vector<TracePoint> series;

  std::optional<std::int64_t> first_alarm() const;
  std::size_t alarm_count() const;
};

// Alarm at t iff Z_t > ucl; t is 1-based.
MonitorTrace monitor_stream(std::span<const double> xs, double lambda, double z0, const ControlLimits& limits);

// Everything a monitoring run needs, as persisted in the limits file.
struct MonitorLimits {
  double decision_threshold = 0.0;
  double z0 = 0.0;
  double ucl = 0.0;
  double lambda = 0.1;
  double quantile = 0.95;
  std::size_t calibration_size = 0;

  ControlLimits control() const { return {ucl, quantile, calibration_size}; }
};

// decision_threshold = quantile of raw scores, z0 = their mean, ucl = quantile
// of the EWMA statistics obtained by running the chart over the same stream.
MonitorLimits calibrate_monitor(std::span<const double> fault_free_scores, double lambda, double quantile);

void write_trace_csv(std::ostream& out, const MonitorTrace& trace);

MonitorLimits read_limits(const std::filesystem::path& path);
void write_limits(const std::filesystem::path& path, const MonitorLimits& limits);

}  // namespace surfmon
