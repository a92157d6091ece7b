// Independent reference implementations used by unit and acceptance tests.
// Written for obviousness, not speed; none of them share code with src/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

struct Component {
  int min_x, min_y, max_x, max_y;
  std::int64_t count;
};

// Depth-first flood fill over a 0/1 grid. Components are returned sorted by
// (min_y, min_x, width, height, count).
inline std::vector<Component> flood_fill(const std::vector<std::uint8_t>& fg, int w, int h, int connectivity) {
  std::vector<char> seen(fg.size(), 0);
  std::vector<Component> out;
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!fg[r * w + c] || seen[r * w + c]) continue;
      Component comp{c, r, c, r, 0};
      seen[r * w + c] = 1;
      stack.push_back({r, c});
      while (!stack.empty()) {
        auto [y, x] = stack.back();
        stack.pop_back();
        ++comp.count;
        comp.min_x = std::min(comp.min_x, x);
        comp.max_x = std::max(comp.max_x, x);
        comp.min_y = std::min(comp.min_y, y);
        comp.max_y = std::max(comp.max_y, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dy == 0 && dx == 0) continue;
            if (connectivity == 4 && dy != 0 && dx != 0) continue;
            const int ny = y + dy;
            const int nx = x + dx;
            if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
            if (!fg[ny * w + nx] || seen[ny * w + nx]) continue;
            seen[ny * w + nx] = 1;
            stack.push_back({ny, nx});
          }
        }
      }
      out.push_back(comp);
    }
  }
  std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
    const auto ka = std::make_tuple(a.min_y, a.min_x, a.max_x - a.min_x, a.max_y - a.min_y, a.count);
    const auto kb = std::make_tuple(b.min_y, b.min_x, b.max_x - b.min_x, b.max_y - b.min_y, b.count);
    return ka < kb;
  });
  return out;
}

struct Clustering {
  std::vector<std::vector<double>> clusters;
  std::size_t selected = 0;
  double intersection = 0.0;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s / static_cast<double>(v.size());
}

inline double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s;
}

// Find Intersections, line by line:
//   sort areas; cluster := [areas[0]]
//   for area in areas[1:]:            (starts at the second element)
//     if |area - mean(cluster)| <= tol: append
//     else: close cluster, start a new one
//   best := argmax sum(cluster)       (ties: more members, smaller mean, first)
//   intersection := mean(best) if |best| > 1 else 0
inline Clustering find_intersections(std::vector<double> areas, double tol) {
  Clustering out;
  if (areas.empty()) return out;
  std::sort(areas.begin(), areas.end());
  std::vector<double> cluster{areas[0]};
  for (std::size_t i = 1; i < areas.size(); ++i) {
    if (std::abs(areas[i] - mean_of(cluster)) <= tol) {
      cluster.push_back(areas[i]);
    } else {
      out.clusters.push_back(cluster);
      cluster = {areas[i]};
    }
  }
  out.clusters.push_back(cluster);
  for (std::size_t k = 1; k < out.clusters.size(); ++k) {
    const auto& a = out.clusters[k];
    const auto& b = out.clusters[out.selected];
    if (sum_of(a) > sum_of(b) ||
        (sum_of(a) == sum_of(b) && a.size() > b.size()) ||
        (sum_of(a) == sum_of(b) && a.size() == b.size() && mean_of(a) < mean_of(b))) {
      out.selected = k;
    }
  }
  const auto& best = out.clusters[out.selected];
  out.intersection = best.size() > 1 ? mean_of(best) : 0.0;
  return out;
}

// Pairwise AUROC: P(score_pos > score_neg) + 0.5 P(tie).
inline double auroc_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Z_t = (1-l)^t z0 + l * sum_{i=1..t} (1-l)^{t-i} x_i
inline double ewma_closed_form(const std::vector<double>& xs, std::size_t t, double lambda, double z0) {
  double z = std::pow(1.0 - lambda, static_cast<double>(t)) * z0;
  for (std::size_t i = 1; i <= t; ++i) {
    z += lambda * std::pow(1.0 - lambda, static_cast<double>(t - i)) * xs[i - 1];
  }
  return z;
}

// ceil(q n)-th smallest value by counting rather than sorting.
inline double order_statistic_quantile(const std::vector<double>& v, double q) {
  const double need = q * static_cast<double>(v.size());
  for (double cand : v) {
    std::size_t le = 0;
    for (double x : v) le += x <= cand ? 1 : 0;
    std::size_t lt = 0;
    for (double x : v) lt += x < cand ? 1 : 0;
    if (static_cast<double>(le) >= need - 1e-9 && static_cast<double>(lt) < need - 1e-9) return cand;
  }
  return std::nan("");
}

}  // namespace oracle
