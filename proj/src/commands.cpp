#include "surfmon/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "surfmon/csv.hpp"
#include "surfmon/error.hpp"
#include "surfmon/evaluation.hpp"
#include "surfmon/image_io.hpp"
#include "surfmon/monitor.hpp"
#include "surfmon/overlay.hpp"
#include "surfmon/parallel.hpp"
#include "surfmon/synth.hpp"

namespace surfmon {
namespace {

PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path);
}

double resolve_decision_threshold(const PipelineConfig& config, const std::string& limits_path) {
  if (config.decision_threshold) return *config.decision_threshold;
  if (limits_path.empty()) {
    throw Error(ErrorKind::Config, "decision_threshold is \"calibrated\"; pass --limits from `calibrate`");
  }
  return read_limits(limits_path).decision_threshold;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace

std::vector<ScoredImage> score_manifest(const DatasetManifest& manifest, const PipelineConfig& config,
                                        double decision_threshold, int workers) {
  auto segmenter = make_segmenter(config);
  const AnalysisParams params = config.analysis_params(decision_threshold);
  std::vector<ScoredImage> results(manifest.entries.size());
  parallel_for(results.size(), workers, [&](std::size_t i) {
    ScoredImage& r = results[i];
    r.entry = manifest.entries[i];
    try {
      const ImageRaster image = read_image(manifest.resolve(r.entry));
      r.analysis = analyze_image(image, r.entry.image_id(), params, *segmenter);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  return results;
}

int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PipelineConfig config = config_or_default(opt.config);
    const double threshold = resolve_decision_threshold(config, opt.limits);
    const ImageRaster image = read_image(opt.image);
    const std::string id = opt.image_id.empty() ? std::filesystem::path(opt.image).stem().string() : opt.image_id;
    auto segmenter = make_segmenter(config);
    const ImageAnalysis analysis = analyze_image(image, id, config.analysis_params(threshold), *segmenter, opt.workers);
    emit(opt.out, to_json(analysis).dump(2) + "\n", out);
    return analysis.decision.verdict == Verdict::Faulty ? kExitFaulty : kExitOk;
  });
}

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PipelineConfig config = config_or_default(opt.config);
    const DatasetManifest manifest = load_manifest(opt.manifest);
    if (manifest.entries.empty()) throw Error(ErrorKind::EmptyCalibrationSet, "calibration manifest is empty");
    for (const auto& e : manifest.entries) {
      if (e.label != 0) {
        throw Error(ErrorKind::CalibrationContaminated, e.path.string() + " is labelled faulty");
      }
    }
    const auto results = score_manifest(manifest, config, 0.0, opt.workers);
    std::vector<double> scores;
    for (const auto& r : results) {
      if (!r.analysis) throw Error(ErrorKind::Io, r.entry.path.string() + ": " + r.error);
      scores.push_back(r.analysis->decision.score);
    }
    const MonitorLimits limits = calibrate_monitor(scores, opt.lambda.value_or(config.ewma.lambda),
                                                   opt.quantile.value_or(config.ewma.quantile));
    const nlohmann::json j{{"decision_threshold", limits.decision_threshold},
                           {"z0", limits.z0},
                           {"ucl", limits.ucl},
                           {"lambda", limits.lambda},
                           {"quantile", limits.quantile},
                           {"calibration_size", limits.calibration_size}};
    emit(opt.out, j.dump(2) + "\n", out);
    return kExitOk;
  });
}

int cmd_batch(const BatchOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PipelineConfig config = config_or_default(opt.config);
    const double threshold = resolve_decision_threshold(config, opt.limits);
    const DatasetManifest manifest = load_manifest(opt.manifest);
    if (manifest.entries.empty()) throw Error(ErrorKind::InvalidArgument, "manifest is empty");

    const auto results = score_manifest(manifest, config, threshold, opt.workers);
    std::vector<PredictionRow> rows;
    std::vector<ScoredLabel> scored;
    std::vector<int> predicted;
    std::vector<int> actual;
    std::size_t failures = 0;
    for (const auto& r : results) {
      if (!r.analysis) {
        ++failures;
        err << "error: " << r.entry.path.string() << ": " << r.error << '\n';
        continue;
      }
      const int pred = r.analysis->decision.verdict == Verdict::Faulty ? 1 : 0;
      rows.push_back({r.entry.image_id(), r.analysis->decision.score, pred, r.entry.label});
      scored.push_back({r.analysis->decision.score, r.entry.label});
      predicted.push_back(pred);
      actual.push_back(r.entry.label);
    }

    std::ostringstream csv;
    write_predictions_csv(csv, rows);
    emit(opt.out, csv.str(), out);

    if (!rows.empty()) {
      MetricReport report = compute_metrics(confusion_from_predictions(predicted, actual));
      if (report.confusion.tp + report.confusion.fn > 0 && report.confusion.tn + report.confusion.fp > 0) {
        report.auroc = compute_auroc(scored);
      }
      const std::string text = to_json(report).dump(2) + "\n";
      if (!opt.metrics.empty()) emit(opt.metrics, text, out);
      else if (!opt.out.empty()) out << text;
    }
    if (failures > 0) {
      err << failures << " of " << results.size() << " images failed\n";
      return kExitError;
    }
    return kExitOk;
  });
}

int cmd_monitor(const MonitorOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MonitorLimits limits = read_limits(opt.limits);
    const CsvTable table = read_csv(opt.scores);
    const std::size_t col = table.has_column("score") ? table.column("score") : table.column("x");
    std::vector<double> xs;
    xs.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) xs.push_back(parse_double(table.rows[i][col], opt.scores, i));

    const MonitorTrace trace = monitor_stream(xs, limits.lambda, limits.z0, limits.control());
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    emit(opt.out, csv.str(), out);

    err << "alarms: " << trace.alarm_count() << "/" << trace.series.size();
    if (const auto first = trace.first_alarm()) err << ", first alarm at t=" << *first;
    else err << ", no alarm";
    err << '\n';
    return kExitOk;
  });
}

int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PipelineConfig config = config_or_default(opt.config);
    SynthSpec spec;
    spec.image_size = opt.size;
    spec.count_per_class = opt.count;
    spec.calibration_count = opt.calibration;
    spec.seed = opt.seed;
    const auto texture = parse_texture(opt.texture);
    if (!texture) throw Error(ErrorKind::InvalidArgument, "unknown texture " + opt.texture);
    spec.texture = *texture;
    spec.defect = {opt.min_size, opt.max_size, opt.intensity_delta};
    if (opt.out_dir.empty()) throw Error(ErrorKind::InvalidArgument, "output directory required");
    const SynthSummary summary = write_synth_dataset(spec, config.window, config.thresholds, opt.out_dir);
    out << "wrote " << summary.images << " images; manifest " << summary.manifest.string();
    if (summary.calibration_manifest) out << "; calibration " << summary.calibration_manifest->string();
    out << '\n';
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = read_predictions_csv(opt.predictions);
    if (rows.empty()) throw Error(ErrorKind::EmptyMatrix, "no predictions in " + opt.predictions);
    std::vector<int> predicted;
    std::vector<int> actual;
    std::vector<ScoredLabel> scored;
    if (opt.limits.empty()) {
      for (const auto& r : rows) {
        predicted.push_back(r.predicted);
        actual.push_back(r.label);
        scored.push_back({r.score, r.label});
      }
    } else {
      const MonitorLimits limits = read_limits(opt.limits);
      std::vector<double> xs;
      for (const auto& r : rows) xs.push_back(r.score);
      const MonitorTrace trace = monitor_stream(xs, limits.lambda, limits.z0, limits.control());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        predicted.push_back(trace.series[i].alarm ? 1 : 0);
        actual.push_back(rows[i].label);
        scored.push_back({trace.series[i].z, rows[i].label});
      }
    }
    MetricReport report = compute_metrics(confusion_from_predictions(predicted, actual));
    if (report.confusion.tp + report.confusion.fn > 0 && report.confusion.tn + report.confusion.fp > 0) {
      report.auroc = compute_auroc(scored);
    }
    emit(opt.out, to_json(report).dump(2) + "\n", out);
    return kExitOk;
  });
}

int cmd_overlay(const OverlayOptions& opt, std::ostream&, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.out.empty()) throw Error(ErrorKind::InvalidArgument, "overlay needs --out");
    const ImageRaster image = read_image(opt.image);
    std::ifstream in(opt.report);
    if (!in) throw Error(ErrorKind::Io, "cannot open report " + opt.report);
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Decode, opt.report + ": " + e.what());
    }
    const auto rects = rectangles_from_report(report, image.width(), image.height());
    write_image(opt.out, draw_rectangles(image, rects));
    return kExitOk;
  });
}

}  // namespace surfmon
