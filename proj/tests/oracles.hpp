#pragma once

// Independent reference computations the library is checked against. They
// favour the obvious O(n^2) formulation over anything clever.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "credrisk/ingest.hpp"

namespace credrisk::oracle {

inline double auc_by_pairs(std::span<const DefaultLabel> y, std::span<const double> s) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != DefaultLabel::Default) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != DefaultLabel::Good) continue;
      pairs += 1.0;
      if (s[i] > s[j]) {
        wins += 1.0;
      } else if (s[i] == s[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

inline double gini(double pos, double total) {
  const double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

struct BruteSplit {
  std::size_t feature = 0;
  double cut = 0.0;  // largest value sent left
  double gain = 0.0;
};

// Tries every (feature, observed value) cut "x <= v" and scores it by
// counting both sides from scratch.
inline std::optional<BruteSplit> gini_split_by_enumeration(const FeatureMatrix& x, std::span<const DefaultLabel> y,
                                                           std::span<const std::size_t> rows) {
  const double n = static_cast<double>(rows.size());
  double pos = 0.0;
  for (std::size_t r : rows) pos += y[r] == DefaultLabel::Default ? 1.0 : 0.0;
  const double parent = gini(pos, n);
  std::optional<BruteSplit> best;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::vector<double> values;
    for (std::size_t r : rows) values.push_back(x(r, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double v = values[k];
      double nl = 0.0;
      double pl = 0.0;
      for (std::size_t r : rows) {
        if (x(r, f) <= v) {
          nl += 1.0;
          pl += y[r] == DefaultLabel::Default ? 1.0 : 0.0;
        }
      }
      const double nr = n - nl;
      const double gain = parent - nl / n * gini(pl, nl) - nr / n * gini(pos - pl, nr);
      if (!best || gain > best->gain + 1e-12) best = BruteSplit{f, v, gain};
    }
  }
  return best;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

// Indices of the k nearest other points, ties to the lower index.
inline std::vector<std::size_t> k_nearest(const std::vector<std::vector<double>>& pts, std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j != i) d.emplace_back(squared_distance(pts[i], pts[j]), j);
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < k && m < d.size(); ++m) out.push_back(d[m].second);
  return out;
}

inline double distance_to_segment(std::span<const double> p, std::span<const double> a, std::span<const double> b) {
  double ab2 = 0.0;
  double dot = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    ab2 += (b[j] - a[j]) * (b[j] - a[j]);
    dot += (p[j] - a[j]) * (b[j] - a[j]);
  }
  const double t = ab2 > 0.0 ? std::clamp(dot / ab2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double q = a[j] + t * (b[j] - a[j]);
    s += (p[j] - q) * (p[j] - q);
  }
  return std::sqrt(s);
}

// Central difference of f along coordinate i.
template <class F>
std::vector<double> numeric_gradient(F&& f, std::vector<double> theta, double h = 1e-5) {
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = f(theta);
    theta[i] = saved - h;
    const double down = f(theta);
    theta[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace credrisk::oracle
