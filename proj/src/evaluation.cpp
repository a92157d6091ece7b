#include "surfmon/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "surfmon/csv.hpp"
#include "surfmon/error.hpp"

namespace surfmon {
namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_label(int v) {
  if (v != 0 && v != 1) throw Error(ErrorKind::InvalidArgument, "labels must be 0 or 1");
}

}  // namespace

MetricReport compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorKind::EmptyMatrix, "confusion matrix is empty");
  MetricReport r;
  r.confusion = cm;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  const double pr = r.precision + r.recall;
  r.f1 = pr > 0.0 ? 2.0 * r.precision * r.recall / pr : 0.0;
  return r;
}

double compute_auroc(std::span<const ScoredLabel> items) {
  std::vector<ScoredLabel> sorted(items.begin(), items.end());
  std::sort(sorted.begin(), sorted.end(), [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });

  // Twice the Mann-Whitney U, kept integral so ties stay exact.
  unsigned __int128 twice_u = 0;
  std::uint64_t negatives_below = 0;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    for (; j < sorted.size() && sorted[j].score == sorted[i].score; ++j) {
      check_label(sorted[j].label);
      (sorted[j].label == 1 ? pos : neg) += 1;
    }
    twice_u += static_cast<unsigned __int128>(pos) * (2 * negatives_below + neg);
    negatives_below += neg;
    positives += pos;
    negatives += neg;
    i = j;
  }
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorKind::DegenerateLabels, "AUROC needs both faulty and fault-free items");
  }
  const long double pairs = static_cast<long double>(positives) * static_cast<long double>(negatives);
  return static_cast<double>(static_cast<long double>(twice_u) / (2.0L * pairs));
}

ConfusionMatrix confusion_from_predictions(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorKind::LengthMismatch, "predicted and actual label counts differ");
  }
  if (predicted.empty()) throw Error(ErrorKind::EmptyMatrix, "no predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    check_label(predicted[i]);
    check_label(actual[i]);
    if (actual[i] == 1) (predicted[i] == 1 ? cm.tp : cm.fn) += 1;
    else (predicted[i] == 1 ? cm.fp : cm.tn) += 1;
  }
  return cm;
}

std::vector<RocPoint> roc_curve(std::span<const ScoredLabel> items) {
  std::vector<double> scores;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  for (const auto& it : items) {
    check_label(it.label);
    scores.push_back(it.score);
    (it.label == 1 ? positives : negatives) += 1;
  }
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorKind::DegenerateLabels, "ROC needs both faulty and fault-free items");
  }
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  std::vector<double> thresholds;
  thresholds.push_back(std::numeric_limits<double>::infinity());
  for (std::size_t k = scores.size() - 1; k > 0; --k) thresholds.push_back(0.5 * (scores[k] + scores[k - 1]));
  thresholds.push_back(-std::numeric_limits<double>::infinity());

  std::vector<RocPoint> curve;
  curve.reserve(thresholds.size());
  for (double th : thresholds) {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    for (const auto& it : items) {
      if (it.score > th) (it.label == 1 ? tp : fp) += 1;
    }
    curve.push_back({th, ratio(fp, negatives), ratio(tp, positives)});
  }
  return curve;
}

double trapezoid_area(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    area += (curve[k].fpr - curve[k - 1].fpr) * (curve[k].tpr + curve[k - 1].tpr) * 0.5;
  }
  return area;
}

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json j{{"accuracy", r.accuracy},
                   {"precision", r.precision},
                   {"recall", r.recall},
                   {"f1", r.f1},
                   {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn}, {"fn", r.confusion.fn}}}};
  j["auroc"] = r.auroc ? nlohmann::json(*r.auroc) : nlohmann::json(nullptr);
  return j;
}

void write_predictions_csv(std::ostream& out, std::span<const PredictionRow> rows) {
  out << "image_id,score,predicted,label\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.score);
    out << r.image_id << ',' << buf << ',' << r.predicted << ',' << r.label << '\n';
  }
}

std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t id_col = table.column("image_id");
  const std::size_t score_col = table.column("score");
  const std::size_t pred_col = table.column("predicted");
  const std::size_t label_col = table.column("label");
  std::vector<PredictionRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    PredictionRow p;
    p.image_id = row[id_col];
    p.score = parse_double(row[score_col], path, i);
    p.predicted = parse_label(row[pred_col], path, i);
    p.label = parse_label(row[label_col], path, i);
    rows.push_back(std::move(p));
  }
  return rows;
}

}  // namespace surfmon
