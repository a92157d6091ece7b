#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace surfmon {

// Positive class is "faulty" (label 1).
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> auroc;
  ConfusionMatrix confusion;
};

struct ScoredLabel {
  double score = 0.0;  // higher means more likely faulty
  int label = 0;
};

// Zero denominators yield 0. Throws EmptyMatrix when total() == 0.
MetricReport compute_metrics(const ConfusionMatrix& cm);

// Probability that a random positive outscores a random negative, ties
// counting one half. Throws DegenerateLabels when a class is absent.
double compute_auroc(std::span<const ScoredLabel> items);

// Throws LengthMismatch (different lengths), EmptyMatrix (no items) or
// InvalidArgument (labels outside {0, 1}).
ConfusionMatrix confusion_from_predictions(std::span<const int> predicted, std::span<const int> actual);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

// ROC obtained by sweeping a strict ">" decision threshold from above the
// largest score, through every midpoint between distinct scores, to below
// the smallest score.
std::vector<RocPoint> roc_curve(std::span<const ScoredLabel> items);
double trapezoid_area(std::span<const RocPoint> curve);

nlohmann::json to_json(const MetricReport& report);

struct PredictionRow {
  std::string image_id;
  double score = 0.0;
  int predicted = 0;
  int label = 0;
};

void write_predictions_csv(std::ostream& out, std::span<const PredictionRow> rows);
std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path);

}  // namespace surfmon
