#include "credrisk/tree.hpp"

#include <algorithm>
#include <numeric>

#include "credrisk/error.hpp"

namespace credrisk {

namespace {

constexpr double kMinGiniGain = 1e-12;

}  // namespace

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
    }
  }
  return best;
}

double split_midpoint(double a, double b) {
  const double mid = a + (b - a) * 0.5;
  return mid < b ? mid : a;
}

void TreeParams::validate() const {
  if (max_depth < 1) fail(ErrorCode::InvalidHyperparameters, "max_depth must be >= 1");
  if (min_samples_split < 2) fail(ErrorCode::InvalidHyperparameters, "min_samples_split must be >= 2");
  if (!(min_gain >= 0.0)) fail(ErrorCode::InvalidHyperparameters, "min_gain must be >= 0");
}

double gini_impurity(std::size_t count0, std::size_t count1) {
  const std::size_t n = count0 + count1;
  if (n == 0) fail(ErrorCode::EmptyNode, "Gini impurity of an empty node");
  const double p0 = static_cast<double>(count0) / static_cast<double>(n);
  const double p1 = static_cast<double>(count1) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

std::optional<Split> best_split_exact(const FeatureMatrix& x, std::span<const DefaultLabel> y,
                                      std::span<const std::size_t> rows,
                                      std::span<const std::size_t> candidate_features, double min_gain) {
  if (rows.size() < 2) return std::nullopt;
  std::size_t pos_total = 0;
  for (std::size_t r : rows) pos_total += y[r] == DefaultLabel::Default ? 1 : 0;
  const std::size_t n = rows.size();
  const double parent = gini_impurity(n - pos_total, pos_total);
  const double dn = static_cast<double>(n);

  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());

  std::optional<Split> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f : features) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = x(a, f);
      const double vb = x(b, f);
      return va < vb || (va == vb && a < b);
    });
    std::size_t left_pos = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_pos += y[order[k]] == DefaultLabel::Default ? 1 : 0;
      const double v = x(order[k], f);
      const double next = x(order[k + 1], f);
      if (v == next) continue;
      const std::size_t nl = k + 1;
      const std::size_t nr = n - nl;
      const double gain = parent - (static_cast<double>(nl) / dn) * gini_impurity(nl - left_pos, left_pos) -
                          (static_cast<double>(nr) / dn) * gini_impurity(nr - (pos_total - left_pos), pos_total - left_pos);
      if (!best || gain > best->gain + kMinGiniGain) best = Split{f, split_midpoint(v, next), gain};
    }
  }
  if (!best || best->gain <= std::max(min_gain, kMinGiniGain)) return std::nullopt;
  return best;
}

namespace {

struct TreeBuilder {
  const FeatureMatrix& x;
  std::span<const DefaultLabel> y;
  const TreeParams& params;
  std::size_t features_per_split;
  Rng& rng;
  Tree tree;

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> all(x.cols());
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (features_per_split >= all.size()) return all;
    // Partial Fisher-Yates: the first k slots become a uniform sample.
    for (std::size_t i = 0; i < features_per_split; ++i) {
      std::swap(all[i], all[i + rng.index(all.size() - i)]);
    }
    all.resize(features_per_split);
    return all;
  }

  std::int32_t build(std::vector<std::size_t> rows, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::size_t pos = 0;
    for (std::size_t r : rows) pos += y[r] == DefaultLabel::Default ? 1 : 0;
    tree.nodes[static_cast<std::size_t>(id)].value = static_cast<double>(pos) / static_cast<double>(rows.size());

    const bool pure = pos == 0 || pos == rows.size();
    if (pure || depth >= params.max_depth || rows.size() < params.min_samples_split) return id;
    const auto features = candidate_features();
    auto split = best_split_exact(x, y, rows, features, params.min_gain);
    if (!split) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) (x(r, split->feature) <= split->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const std::int32_t l = build(std::move(left), depth + 1);
    const std::int32_t r = build(std::move(right), depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

Tree fit_classification_tree(const FeatureMatrix& x, std::span<const DefaultLabel> y,
                             std::span<const std::size_t> rows, const TreeParams& params,
                             std::size_t features_per_split, Rng& rng) {
  params.validate();
  if (rows.empty()) fail(ErrorCode::EmptyInput, "cannot grow a tree on zero rows");
  TreeBuilder builder{x, y, params, std::max<std::size_t>(1, features_per_split), rng, {}};
  builder.build(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  return std::move(builder.tree);
}

}  // namespace credrisk
