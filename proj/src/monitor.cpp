#include "surfmon/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "surfmon/error.hpp"

namespace surfmon {

EwmaState EwmaState::start(double lambda, double z0) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidArgument, "lambda must lie in (0, 1)");
  if (!std::isfinite(z0)) throw Error(ErrorKind::InvalidArgument, "z0 must be finite");
  return {lambda, z0, 0};
}

EwmaState ewma_update(const EwmaState& state, double x) {
  return {state.lambda, (1.0 - state.lambda) * state.z + state.lambda * x, state.t + 1};
}

double calibrate_z0(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::EmptyCalibrationSet, "no fault-free scores to average");
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

ControlLimits calibrate_ucl(std::span<const double> values, double quantile) {
  if (values.empty()) throw Error(ErrorKind::EmptyCalibrationSet, "no in-control values for the UCL");
  if (!(quantile > 0.0 && quantile < 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile must lie in (0, 1)");
  const std::size_t n = values.size();
  // The 1e-9 slack keeps decimal quantiles like 0.95 from being pushed up a
  // rank by their binary representation.
  auto rank = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  return {sorted[rank - 1], quantile, n};
}

std::vector<double> ewma_series(std::span<const double> xs, double lambda, double z0) {
  EwmaState state = EwmaState::start(lambda, z0);
  std::vector<double> zs;
  zs.reserve(xs.size());
  for (double x : xs) {
    state = ewma_update(state, x);
    zs.push_back(state.z);
  }
  return zs;
}

std::optional<std::int64_t> MonitorTrace::first_alarm() const {
  for (const auto& p : series) {
    if (p.alarm) return p.t;
  }
  return std::nullopt;
}

std::size_t MonitorTrace::alarm_count() const {
  return static_cast<std::size_t>(std::count_if(series.begin(), series.end(), [](const TracePoint& p) { return p.alarm; }));
}

MonitorTrace monitor_stream(std::span<const double> xs, double lambda, double z0, const ControlLimits& limits) {
  EwmaState state = EwmaState::start(lambda, z0);
  MonitorTrace trace;
  trace.series.reserve(xs.size());
  for (double x : xs) {
    state = ewma_update(state, x);
    trace.series.push_back({state.t, x, state.z, state.z > limits.ucl});
  }
  return trace;
}

MonitorLimits calibrate_monitor(std::span<const double> scores, double lambda, double quantile) {
  MonitorLimits limits;
  limits.lambda = lambda;
  limits.quantile = quantile;
  limits.decision_threshold = calibrate_ucl(scores, quantile).ucl;
  limits.z0 = calibrate_z0(scores);
  const auto zs = ewma_series(scores, lambda, limits.z0);
  const ControlLimits cl = calibrate_ucl(zs, quantile);
  limits.ucl = cl.ucl;
  limits.calibration_size = cl.calibration_size;
  return limits;
}

void write_trace_csv(std::ostream& out, const MonitorTrace& trace) {
  out << "t,x,z,alarm\n";
  char buf[128];
  for (const auto& p : trace.series) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%d\n", static_cast<long long>(p.t), p.x, p.z, p.alarm ? 1 : 0);
    out << buf;
  }
}

MonitorLimits read_limits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open limits file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, "limits file " + path.string() + ": " + e.what());
  }
  auto num = [&](const char* key, bool required) -> std::optional<double> {
    if (!j.contains(key)) {
      if (required) throw Error(ErrorKind::Config, std::string("limits file lacks \"") + key + "\"");
      return std::nullopt;
    }
    if (!j[key].is_number()) throw Error(ErrorKind::Config, std::string("limits.") + key + " must be a number");
    return j[key].get<double>();
  };
  MonitorLimits l;
  l.ucl = *num("ucl", true);
  l.z0 = *num("z0", true);
  l.lambda = *num("lambda", true);
  l.quantile = num("quantile", false).value_or(0.95);
  l.decision_threshold = num("decision_threshold", false).value_or(0.0);
  l.calibration_size = static_cast<std::size_t>(num("calibration_size", false).value_or(0.0));
  return l;
}

void write_limits(const std::filesystem::path& path, const MonitorLimits& l) {
  const nlohmann::json j{{"decision_threshold", l.decision_threshold},
                         {"z0", l.z0},
                         {"ucl", l.ucl},
                         {"lambda", l.lambda},
                         {"quantile", l.quantile},
                         {"calibration_size", l.calibration_size}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write limits file " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace surfmon
