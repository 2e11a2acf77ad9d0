#include "credrisk/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credrisk/error.hpp"
#include "credrisk/random.hpp"

namespace credrisk {

void SplitConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "train fraction must lie strictly between 0 and 1");
  }
}

void SmoteConfig::validate() const {
  if (k_neighbors < 1) fail(ErrorCode::InvalidArgument, "SMOTE k must be >= 1");
  if (!(target_ratio > 0.0 && target_ratio <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "SMOTE target ratio must lie in (0, 1]");
  }
}

SplitResult stratified_split(const LabeledDataset& data, const SplitConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<std::size_t> train_idx;

  auto take = [&](std::vector<std::size_t> pool) {
    const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(pool.size())));
    rng.shuffle(std::span<std::size_t>(pool));
    train_idx.insert(train_idx.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
  };

  if (cfg.stratified) {
    for (DefaultLabel cls : {DefaultLabel::Good, DefaultLabel::Default}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] == cls) members.push_back(i);
      }
      if (members.size() < 2) {
        fail(ErrorCode::DegenerateClass, "class " + std::to_string(to_int(cls)) + " has " +
                                             std::to_string(members.size()) + " rows; need at least 2");
      }
      take(std::move(members));
    }
  } else {
    if (!data.has_both_classes()) fail(ErrorCode::DegenerateClass, "dataset holds a single class");
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    take(std::move(all));
  }

  std::sort(train_idx.begin(), train_idx.end());
  std::vector<std::size_t> test_idx;
  std::vector<bool> in_train(data.size(), false);
  for (std::size_t i : train_idx) in_train[i] = true;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!in_train[i]) test_idx.push_back(i);
  }
  return {data.subset(train_idx), data.subset(test_idx), std::move(train_idx), std::move(test_idx)};
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const std::vector<std::vector<double>>& points,
                                                        std::size_t k) {
  const std::size_t m = points.size();
  std::vector<std::vector<std::size_t>> out(m);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t f = 0; f < points[i].size(); ++f) {
        const double diff = points[i][f] - points[j][f];
        d2 += diff * diff;
      }
      dist.emplace_back(d2, j);
    }
    const std::size_t kk = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    out[i].reserve(kk);
    for (std::size_t r = 0; r < kk; ++r) out[i].push_back(dist[r].second);
  }
  return out;
}

LabeledDataset smote(const LabeledDataset& train, const SmoteConfig& cfg) {
  cfg.validate();
  const std::size_t n_good = train.count(DefaultLabel::Good);
  const std::size_t n_bad = train.count(DefaultLabel::Default);
  // Equal counts: label 1 is treated as the minority.
  const DefaultLabel minority = n_bad <= n_good ? DefaultLabel::Default : DefaultLabel::Good;
  const std::size_t n_min = std::min(n_good, n_bad);
  const std::size_t n_maj = std::max(n_good, n_bad);
  if (n_min <= cfg.k_neighbors) {
    fail(ErrorCode::TooFewMinority, "minority class has " + std::to_string(n_min) + " rows; SMOTE with k=" +
                                        std::to_string(cfg.k_neighbors) + " needs more than k");
  }

  const auto target = static_cast<std::size_t>(std::llround(cfg.target_ratio * static_cast<double>(n_maj)));
  if (target <= n_min) return train;
  const std::size_t to_make = target - n_min;

  std::vector<std::vector<double>> points;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.labels[i] == minority) {
      auto r = train.features.row(i);
      points.emplace_back(r.begin(), r.end());
    }
  }
  const auto neighbors = nearest_neighbors(points, cfg.k_neighbors);

  const std::size_t d = train.features.cols();
  std::vector<double> values = train.features.values();
  values.reserve(values.size() + to_make * d);
  std::vector<DefaultLabel> labels = train.labels;
  std::vector<bool> synthetic = train.synthetic;

  Rng rng(cfg.seed);
  for (std::size_t s = 0; s < to_make; ++s) {
    // Base points are visited round-robin so each contributes evenly.
    const std::size_t base = s % points.size();
    const std::size_t nn = neighbors[base][rng.index(neighbors[base].size())];
    const double u = rng.uniform_closed();
    for (std::size_t f = 0; f < d; ++f) {
      values.push_back(points[base][f] + u * (points[nn][f] - points[base][f]));
    }
    labels.push_back(minority);
    synthetic.push_back(true);
  }
  return LabeledDataset(FeatureMatrix(train.features.column_names(), std::move(values)), std::move(labels),
                        std::move(synthetic));
}

}  // namespace credrisk
