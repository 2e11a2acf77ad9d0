#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "credrisk/ingest.hpp"
#include "credrisk/random.hpp"

namespace credrisk {

// Binary tree stored as a node array. Rows with x[feature] <= threshold go
// left. Leaves have feature == -1 and carry `value`.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  std::size_t leaf_count() const;
  // Edges on the longest root-to-leaf path; a single leaf has depth 0.
  std::size_t depth() const;
};

// Threshold strictly between a < b that sends a left and b right.
double split_midpoint(double a, double b);

struct TreeParams {
  std::size_t max_depth = 8;
  std::size_t min_samples_split = 2;
  double min_gain = 0.0;

  void validate() const;
};

// 1 - p0^2 - p1^2. Throws EmptyNode for an empty node.
double gini_impurity(std::size_t count0, std::size_t count1);

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best weighted Gini decrease over the candidate features and every midpoint
// between consecutive distinct values among `rows`. Ties go to the lower
// feature index, then the lower threshold. `rows` may repeat (bootstrap).
std::optional<Split> best_split_exact(const FeatureMatrix& x, std::span<const DefaultLabel> y,
                                      std::span<const std::size_t> rows,
                                      std::span<const std::size_t> candidate_features, double min_gain = 0.0);

// CART classification tree; leaves hold the fraction of label-1 rows. When
// `features_per_split` is below the column count, each split draws that many
// candidate features from `rng`.
Tree fit_classification_tree(const FeatureMatrix& x, std::span<const DefaultLabel> y,
                             std::span<const std::size_t> rows, const TreeParams& params,
                             std::size_t features_per_split, Rng& rng);

}  // namespace credrisk
