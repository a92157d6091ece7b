#include "surfmon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "surfmon/error.hpp"
#include "surfmon/parallel.hpp"

namespace surfmon {

void AreaThresholds::validate() const {
  if (!(lower >= 0.0) || !(lower < upper)) {
    throw Error(ErrorKind::Config, "area thresholds need 0 <= lower < upper");
  }
}

void ClusterParams::validate() const {
  if (!(tolerance >= 0.0)) throw Error(ErrorKind::Config, "cluster tolerance must be >= 0");
}

std::int64_t mask_area(const MaskRecord& mask, AreaMode mode) {
  return mode == AreaMode::BBox ? mask.bbox_area() : mask.pixel_count;
}

std::vector<AreaSample> compute_areas(std::span<const MaskRecord> masks, const AreaThresholds& thresholds,
                                      AreaMode mode, int window_row, int window_col) {
  std::vector<AreaSample> out;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const MaskRecord& m = masks[i];
    const std::int64_t area = mask_area(m, mode);
    if (!thresholds.admits(static_cast<double>(area))) continue;
    AreaSample s;
    s.area = area;
    s.window_row = window_row;
    s.window_col = window_col;
    s.mask_index = static_cast<int>(i);
    s.bbox[0] = m.bbox_x;
    s.bbox[1] = m.bbox_y;
    s.bbox[2] = m.bbox_w;
    s.bbox[3] = m.bbox_h;
    out.push_back(s);
  }
  return out;
}

ClusterOutcome cluster_areas(std::span<const AreaSample> samples, double tolerance) {
  ClusterOutcome outcome;
  if (samples.empty()) return outcome;

  std::vector<AreaSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const AreaSample& a, const AreaSample& b) {
    return std::tie(a.area, a.window_row, a.window_col, a.mask_index) <
           std::tie(b.area, b.window_row, b.window_col, b.mask_index);
  });

  std::vector<std::int64_t> sums;
  std::vector<AreaSample> current{sorted.front()};
  std::int64_t current_sum = sorted.front().area;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double mean = static_cast<double>(current_sum) / static_cast<double>(current.size());
    if (std::abs(static_cast<double>(sorted[i].area) - mean) <= tolerance) {
      current.push_back(sorted[i]);
      current_sum += sorted[i].area;
    } else {
      outcome.clusters.push_back(std::move(current));
      sums.push_back(current_sum);
      current = {sorted[i]};
      current_sum = sorted[i].area;
    }
  }
  outcome.clusters.push_back(std::move(current));
  sums.push_back(current_sum);

  std::size_t best = 0;
  for (std::size_t k = 1; k < outcome.clusters.size(); ++k) {
    const auto nk = static_cast<__int128>(outcome.clusters[k].size());
    const auto nb = static_cast<__int128>(outcome.clusters[best].size());
    if (sums[k] != sums[best]) {
      if (sums[k] > sums[best]) best = k;
    } else if (nk != nb) {
      if (nk > nb) best = k;
    } else if (static_cast<__int128>(sums[k]) * nb < static_cast<__int128>(sums[best]) * nk) {
      best = k;
    }
  }
  outcome.selected_index = best;
  const auto& chosen = outcome.clusters[best];
  if (chosen.size() > 1) {
    outcome.intersection = static_cast<double>(sums[best]) / static_cast<double>(chosen.size());
  }
  return outcome;
}

Decision decide(double intersection, double decision_threshold) {
  if (!(decision_threshold >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "decision threshold must be >= 0");
  }
  return {intersection > decision_threshold ? Verdict::Faulty : Verdict::FaultFree, intersection};
}

const char* to_string(Verdict verdict) {
  return verdict == Verdict::Faulty ? "faulty" : "fault_free";
}

ImageAnalysis analyze_image(const ImageRaster& image, const std::string& image_id,
                            const AnalysisParams& params, Segmenter& segmenter, int workers) {
  params.window.validate();
  params.thresholds.validate();
  params.cluster.validate();

  const ImageRaster gray = preprocess(image, params.normalize_brightness);
  const std::vector<WindowView> windows = split_image(gray, params.window);

  std::vector<std::vector<MaskRecord>> masks(windows.size());
  parallel_for(windows.size(), workers, [&](std::size_t i) {
    const WindowView& w = windows[i];
    masks[i] = segmenter.segment(w, WindowIdentity{image_id, w.origin_row, w.origin_col});
  });

  ImageAnalysis result;
  result.image_id = image_id;
  result.width = image.width();
  result.height = image.height();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const WindowView& w = windows[i];
    auto kept = compute_areas(masks[i], params.thresholds, params.cluster.area_mode, w.origin_row, w.origin_col);
    result.retained.insert(result.retained.end(), kept.begin(), kept.end());
    if (!masks[i].empty()) result.windows.push_back({{w.origin_row, w.origin_col}, std::move(masks[i])});
  }
  result.outcome = cluster_areas(result.retained, params.cluster.tolerance);
  result.decision = decide(result.outcome.intersection, params.decision_threshold);
  return result;
}

nlohmann::json to_json(const ImageAnalysis& a) {
  auto clusters = nlohmann::json::array();
  for (const auto& c : a.outcome.clusters) {
    auto areas = nlohmann::json::array();
    for (const auto& s : c) areas.push_back(s.area);
    clusters.push_back(std::move(areas));
  }
  auto retained = nlohmann::json::array();
  for (const auto& s : a.retained) {
    retained.push_back({{"area", s.area},
                        {"window", {s.window_row, s.window_col}},
                        {"mask_index", s.mask_index},
                        {"bbox", {s.bbox[0], s.bbox[1], s.bbox[2], s.bbox[3]}}});
  }
  auto windows = nlohmann::json::array();
  for (const auto& w : a.windows) {
    auto masks = nlohmann::json::array();
    for (const auto& m : w.masks) masks.push_back(to_json(m));
    windows.push_back({{"origin", {w.origin.row, w.origin.col}}, {"masks", std::move(masks)}});
  }
  nlohmann::json j{{"image_id", a.image_id},
                   {"width", a.width},
                   {"height", a.height},
                   {"verdict", to_string(a.decision.verdict)},
                   {"score", a.decision.score},
                   {"intersection", a.outcome.intersection},
                   {"clusters", std::move(clusters)},
                   {"retained_samples", std::move(retained)},
                   {"windows", std::move(windows)}};
  j["selected_cluster"] = a.outcome.selected_index ? nlohmann::json(*a.outcome.selected_index) : nlohmann::json(nullptr);
  return j;
}

}  // namespace surfmon
