#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "credrisk/ingest.hpp"
#include "credrisk/tree.hpp"

namespace credrisk {

enum class Growth { LevelWise, LeafWise };

struct BoostParams {
  std::size_t n_rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 6;
  std::size_t num_leaves = 31;  // leaf-wise only
  double lambda = 1.0;
  std::size_t n_bins = 255;  // leaf-wise only
  Growth growth = Growth::LevelWise;

  // Leaf-wise growth requires num_leaves <= 2^max_depth.
  void validate() const;
};

// Newton split score for a left/right partition of gradient and hessian sums:
// 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)].
double newton_gain(double grad_left, double hess_left, double grad_right, double hess_right, double lambda);

// Optimal leaf weight -G/(H+l).
double leaf_weight(double grad_sum, double hess_sum, double lambda);

struct NewtonSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Exact Newton-gain search over midpoints of consecutive distinct values
// among `rows` (ascending row indices).
std::optional<NewtonSplit> best_split_newton_exact(const FeatureMatrix& x, std::span<const std::size_t> rows,
                                                   std::span<const double> gradients,
                                                   std::span<const double> hessians, double lambda);

// Per-feature bin edges from training quantiles. Values v with v <= edge[b]
// and v > edge[b-1] fall in bin b; values beyond the last edge clamp to the
// final bin. When a feature has at most n_bins distinct values every value
// gets its own bin and edges are the midpoints between them.
class BinMapper {
 public:
  BinMapper() = default;
  static BinMapper fit(const FeatureMatrix& x, std::size_t n_bins);

  std::size_t features() const { return edges_.size(); }
  std::size_t bin_count(std::size_t feature) const { return edges_[feature].size() + 1; }
  const std::vector<double>& edges(std::size_t feature) const { return edges_[feature]; }
  std::uint16_t bin(std::size_t feature, double value) const;
  // Split "bin <= b" expressed as a raw-value threshold.
  double threshold(std::size_t feature, std::size_t bin) const { return edges_[feature][bin]; }

 private:
  std::vector<std::vector<double>> edges_;
};

struct BinnedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> codes;  // row-major
  std::vector<std::size_t> bins_per_feature;

  std::uint16_t operator()(std::size_t i, std::size_t j) const { return codes[i * cols + j]; }
  static BinnedMatrix build(const FeatureMatrix& x, const BinMapper& mapper);
};

struct HistogramSplit {
  std::size_t feature = 0;
  std::size_t bin = 0;  // rows with code <= bin go left
  double gain = 0.0;
};

// Best Newton-gain boundary between adjacent bins, both sides non-empty.
std::optional<HistogramSplit> best_split_histogram(const BinnedMatrix& binned, std::span<const std::size_t> rows,
                                                   std::span<const double> gradients,
                                                   std::span<const double> hessians, double lambda);

// Splits every splittable node of a depth before moving deeper, up to
// max_depth, using exact splits.
Tree grow_tree_level_wise(const FeatureMatrix& x, std::span<const double> gradients,
                          std::span<const double> hessians, const BoostParams& params);

// Repeatedly splits the leaf with the highest histogram gain until
// num_leaves leaves exist or no positive-gain split remains.
Tree grow_tree_leaf_wise(const BinnedMatrix& binned, const BinMapper& mapper, std::span<const double> gradients,
                         std::span<const double> hessians, const BoostParams& params);

struct BoostedEnsemble {
  double base_score = 0.0;  // log-odds of the training prevalence
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  // Mean training log-loss after 0..n_rounds rounds.
  std::vector<double> loss_trace;

  double raw_score(std::span<const double> x) const;
};

BoostedEnsemble boost_fit(const LabeledDataset& train, const BoostParams& params);

double log_loss(std::span<const DefaultLabel> y, std::span<const double> raw_scores);

}  // namespace credrisk
