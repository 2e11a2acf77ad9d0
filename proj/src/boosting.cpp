#include "credrisk/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "credrisk/error.hpp"

namespace credrisk {

namespace {

// Splits must beat rounding noise on the parent's own score.
bool is_positive_gain(double gain, double grad_sum, double hess_sum, double lambda) {
  const double denom = hess_sum + lambda;
  const double parent = denom > 0.0 ? grad_sum * grad_sum / denom : 0.0;
  return gain > 1e-10 * (1.0 + std::fabs(parent));
}

// Candidates within rounding distance of the incumbent count as ties, which
// keep the earlier (lower feature, lower threshold) split. Exact and binned
// searches accumulate in different orders, so a strict comparison would let
// rounding pick between equivalent partitions.
bool beats(double gain, double incumbent) { return gain > incumbent + 1e-12 * (1.0 + std::fabs(incumbent)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

struct NodeStats {
  double grad = 0.0;
  double hess = 0.0;
};

NodeStats sum_stats(std::span<const std::size_t> rows, std::span<const double> g, std::span<const double> h) {
  NodeStats s;
  for (std::size_t r : rows) {
    s.grad += g[r];
    s.hess += h[r];
  }
  return s;
}

// Exact level-wise growth. Each feature's row order is sorted once; a level
// is evaluated with one pass per feature that advances every frontier node
// at the same time.
class LevelWiseGrower {
 public:
  explicit LevelWiseGrower(const FeatureMatrix& x) : x_(x), sorted_(x.cols()) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      auto& order = sorted_[j];
      order.resize(x.rows());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = x(a, j);
        const double vb = x(b, j);
        return va < vb || (va == vb && a < b);
      });
    }
  }

  Tree grow(std::span<const double> g, std::span<const double> h, const BoostParams& params) const {
    const std::size_t n = x_.rows();
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<std::int32_t> node_of(n, 0);
    std::vector<std::size_t> frontier{0};
    std::vector<NodeStats> stats(1);
    for (std::size_t i = 0; i < n; ++i) {
      stats[0].grad += g[i];
      stats[0].hess += h[i];
    }

    struct Scan {
      double grad = 0.0;
      double hess = 0.0;
      std::size_t count = 0;
      double last = 0.0;
    };
    struct Best {
      bool found = false;
      std::size_t feature = 0;
      double threshold = 0.0;
      double gain = 0.0;
    };

    for (std::size_t depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
      std::vector<std::int32_t> slot_of(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) slot_of[frontier[s]] = static_cast<std::int32_t>(s);
      std::vector<Best> best(frontier.size());
      std::vector<Scan> scan(frontier.size());

      for (std::size_t j = 0; j < x_.cols(); ++j) {
        std::fill(scan.begin(), scan.end(), Scan{});
        for (std::size_t i : sorted_[j]) {
          if (node_of[i] < 0) continue;
          const std::int32_t s = slot_of[static_cast<std::size_t>(node_of[i])];
          if (s < 0) continue;
          Scan& st = scan[static_cast<std::size_t>(s)];
          const double v = x_(i, j);
          if (st.count > 0 && v != st.last) {
            const NodeStats& parent = stats[frontier[static_cast<std::size_t>(s)]];
            const double gain = newton_gain(st.grad, st.hess, parent.grad - st.grad, parent.hess - st.hess,
                                            params.lambda);
            Best& b = best[static_cast<std::size_t>(s)];
            if (!b.found || beats(gain, b.gain)) b = Best{true, j, split_midpoint(st.last, v), gain};
          }
          st.grad += g[i];
          st.hess += h[i];
          ++st.count;
          st.last = v;
        }
      }

      std::vector<std::size_t> next;
      std::vector<std::int32_t> left_of(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        const std::size_t node = frontier[s];
        const Best& b = best[s];
        if (!b.found || !is_positive_gain(b.gain, stats[node].grad, stats[node].hess, params.lambda)) {
          continue;
        }
        const auto l = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        stats.resize(tree.nodes.size());
        TreeNode& parent = tree.nodes[node];
        parent.feature = static_cast<std::int32_t>(b.feature);
        parent.threshold = b.threshold;
        parent.left = l;
        parent.right = l + 1;
        left_of[node] = l;
        next.push_back(static_cast<std::size_t>(l));
        next.push_back(static_cast<std::size_t>(l + 1));
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (node_of[i] < 0) continue;
        const auto node = static_cast<std::size_t>(node_of[i]);
        if (left_of[node] < 0) {
          node_of[i] = -1;  // settled in a leaf
          continue;
        }
        const TreeNode& p = tree.nodes[node];
        const std::int32_t child = x_(i, static_cast<std::size_t>(p.feature)) <= p.threshold ? p.left : p.right;
        node_of[i] = child;
        stats[static_cast<std::size_t>(child)].grad += g[i];
        stats[static_cast<std::size_t>(child)].hess += h[i];
      }
      frontier = std::move(next);
    }

    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      if (tree.nodes[k].is_leaf()) tree.nodes[k].value = leaf_weight(stats[k].grad, stats[k].hess, params.lambda);
    }
    return tree;
  }

 private:
  const FeatureMatrix& x_;
  std::vector<std::vector<std::size_t>> sorted_;
};

}  // namespace

void BoostParams::validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    fail(ErrorCode::InvalidHyperparameters, "learning_rate must lie in (0, 1]");
  }
  if (max_depth < 1) fail(ErrorCode::InvalidHyperparameters, "max_depth must be >= 1");
  if (!(lambda >= 0.0)) fail(ErrorCode::InvalidHyperparameters, "lambda must be >= 0");
  if (n_bins < 2 || n_bins > 65535) fail(ErrorCode::InvalidHyperparameters, "n_bins must lie in [2, 65535]");
  if (num_leaves < 1) fail(ErrorCode::InvalidHyperparameters, "num_leaves must be >= 1");
  if (growth == Growth::LeafWise) {
    const bool fits = max_depth >= 63 || num_leaves <= (std::size_t{1} << max_depth);
    if (!fits) {
      fail(ErrorCode::InvalidHyperparameters,
           "num_leaves=" + std::to_string(num_leaves) + " exceeds 2^max_depth=" +
               std::to_string(std::size_t{1} << max_depth) + " (num_leaves must be <= 2^max_depth)");
    }
  }
}

double newton_gain(double grad_left, double hess_left, double grad_right, double hess_right, double lambda) {
  auto score = [&](double g, double h) {
    const double d = h + lambda;
    return d > 0.0 ? g * g / d : 0.0;
  };
  return 0.5 * (score(grad_left, hess_left) + score(grad_right, hess_right) -
                score(grad_left + grad_right, hess_left + hess_right));
}

double leaf_weight(double grad_sum, double hess_sum, double lambda) {
  const double d = hess_sum + lambda;
  return d > 0.0 ? -grad_sum / d : 0.0;
}

std::optional<NewtonSplit> best_split_newton_exact(const FeatureMatrix& x, std::span<const std::size_t> rows,
                                                   std::span<const double> gradients,
                                                   std::span<const double> hessians, double lambda) {
  if (rows.size() < 2) return std::nullopt;
  const NodeStats total = sum_stats(rows, gradients, hessians);
  std::optional<NewtonSplit> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = x(a, j);
      const double vb = x(b, j);
      return va < vb || (va == vb && a < b);
    });
    double gl = 0.0;
    double hl = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      gl += gradients[order[k]];
      hl += hessians[order[k]];
      const double v = x(order[k], j);
      const double next = x(order[k + 1], j);
      if (v == next) continue;
      const double gain = newton_gain(gl, hl, total.grad - gl, total.hess - hl, lambda);
      if (!best || beats(gain, best->gain)) best = NewtonSplit{j, split_midpoint(v, next), gain};
    }
  }
  if (!best || !is_positive_gain(best->gain, total.grad, total.hess, lambda)) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------
// Histograms

BinMapper BinMapper::fit(const FeatureMatrix& x, std::size_t n_bins) {
  if (n_bins < 2) fail(ErrorCode::InvalidHyperparameters, "n_bins must be >= 2");
  BinMapper mapper;
  mapper.edges_.resize(x.cols());
  std::vector<double> column(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) column[i] = x(i, j);
    std::sort(column.begin(), column.end());
    std::vector<double> distinct;
    std::unique_copy(column.begin(), column.end(), std::back_inserter(distinct));
    auto& edges = mapper.edges_[j];
    if (distinct.size() <= n_bins) {
      for (std::size_t k = 0; k + 1 < distinct.size(); ++k) edges.push_back(split_midpoint(distinct[k], distinct[k + 1]));
      continue;
    }
    // Cut just below the training quantile values k/n_bins.
    for (std::size_t b = 1; b < n_bins; ++b) {
      const std::size_t q = b * column.size() / n_bins;
      const double cut = column[q];
      auto it = std::lower_bound(distinct.begin(), distinct.end(), cut);
      if (it == distinct.begin()) continue;
      const double edge = split_midpoint(*(it - 1), *it);
      if (edges.empty() || edge > edges.back()) edges.push_back(edge);
    }
  }
  return mapper;
}

std::uint16_t BinMapper::bin(std::size_t feature, double value) const {
  const auto& e = edges_[feature];
  return static_cast<std::uint16_t>(std::lower_bound(e.begin(), e.end(), value) - e.begin());
}

BinnedMatrix BinnedMatrix::build(const FeatureMatrix& x, const BinMapper& mapper) {
  if (mapper.features() != x.cols()) fail(ErrorCode::ColumnMismatch, "bin mapper was fitted on other columns");
  BinnedMatrix out;
  out.rows = x.rows();
  out.cols = x.cols();
  out.codes.resize(out.rows * out.cols);
  for (std::size_t i = 0; i < out.rows; ++i) {
    for (std::size_t j = 0; j < out.cols; ++j) out.codes[i * out.cols + j] = mapper.bin(j, x(i, j));
  }
  for (std::size_t j = 0; j < out.cols; ++j) out.bins_per_feature.push_back(mapper.bin_count(j));
  return out;
}

std::optional<HistogramSplit> best_split_histogram(const BinnedMatrix& binned, std::span<const std::size_t> rows,
                                                   std::span<const double> gradients,
                                                   std::span<const double> hessians, double lambda) {
  if (rows.size() < 2) return std::nullopt;
  const NodeStats total = sum_stats(rows, gradients, hessians);
  std::optional<HistogramSplit> best;
  std::vector<double> hg;
  std::vector<double> hh;
  std::vector<std::size_t> hc;
  for (std::size_t j = 0; j < binned.cols; ++j) {
    const std::size_t bins = binned.bins_per_feature[j];
    if (bins < 2) continue;
    hg.assign(bins, 0.0);
    hh.assign(bins, 0.0);
    hc.assign(bins, 0);
    for (std::size_t r : rows) {
      const std::uint16_t b = binned(r, j);
      hg[b] += gradients[r];
      hh[b] += hessians[r];
      ++hc[b];
    }
    double gl = 0.0;
    double hl = 0.0;
    std::size_t cl = 0;
    for (std::size_t b = 0; b + 1 < bins; ++b) {
      gl += hg[b];
      hl += hh[b];
      cl += hc[b];
      if (cl == 0) continue;
      if (cl == rows.size()) break;
      if (hc[b] == 0) continue;  // same partition as an earlier boundary
      const double gain = newton_gain(gl, hl, total.grad - gl, total.hess - hl, lambda);
      if (!best || beats(gain, best->gain)) best = HistogramSplit{j, b, gain};
    }
  }
  if (!best || !is_positive_gain(best->gain, total.grad, total.hess, lambda)) return std::nullopt;
  return best;
}

Tree grow_tree_level_wise(const FeatureMatrix& x, std::span<const double> gradients,
                          std::span<const double> hessians, const BoostParams& params) {
  if (x.rows() == 0) fail(ErrorCode::EmptyInput, "cannot grow a tree on zero rows");
  return LevelWiseGrower(x).grow(gradients, hessians, params);
}

Tree grow_tree_leaf_wise(const BinnedMatrix& binned, const BinMapper& mapper, std::span<const double> gradients,
                         std::span<const double> hessians, const BoostParams& params) {
  if (binned.rows == 0) fail(ErrorCode::EmptyInput, "cannot grow a tree on zero rows");
  struct Leaf {
    std::size_t node = 0;
    std::size_t depth = 0;
    std::vector<std::size_t> rows;
    std::optional<HistogramSplit> split;
  };
  auto evaluate = [&](Leaf& leaf) {
    leaf.split.reset();
    if (leaf.depth < params.max_depth) {
      leaf.split = best_split_histogram(binned, leaf.rows, gradients, hessians, params.lambda);
    }
  };

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<Leaf> leaves(1);
  leaves[0].rows.resize(binned.rows);
  std::iota(leaves[0].rows.begin(), leaves[0].rows.end(), std::size_t{0});
  evaluate(leaves[0]);

  while (leaves.size() < params.num_leaves) {
    // Highest gain wins; ties go to the earliest-created node.
    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      if (!leaves[k].split) continue;
      if (!pick || leaves[k].split->gain > leaves[*pick].split->gain ||
          (leaves[k].split->gain == leaves[*pick].split->gain && leaves[k].node < leaves[*pick].node)) {
        pick = k;
      }
    }
    if (!pick) break;

    Leaf parent = std::move(leaves[*pick]);
    const HistogramSplit split = *parent.split;
    Leaf left{tree.nodes.size(), parent.depth + 1, {}, {}};
    Leaf right{tree.nodes.size() + 1, parent.depth + 1, {}, {}};
    for (std::size_t r : parent.rows) (binned(r, split.feature) <= split.bin ? left.rows : right.rows).push_back(r);
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& p = tree.nodes[parent.node];
    p.feature = static_cast<std::int32_t>(split.feature);
    p.threshold = mapper.threshold(split.feature, split.bin);
    p.left = static_cast<std::int32_t>(left.node);
    p.right = static_cast<std::int32_t>(right.node);
    evaluate(left);
    evaluate(right);
    leaves[*pick] = std::move(left);
    leaves.push_back(std::move(right));
  }

  for (const Leaf& leaf : leaves) {
    const NodeStats s = sum_stats(leaf.rows, gradients, hessians);
    tree.nodes[leaf.node].value = leaf_weight(s.grad, s.hess, params.lambda);
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Ensemble

double BoostedEnsemble::raw_score(std::span<const double> x) const {
  double f = base_score;
  for (const Tree& t : trees) f += learning_rate * t.predict(x);
  return f;
}

double log_loss(std::span<const DefaultLabel> y, std::span<const double> raw_scores) {
  if (y.size() != raw_scores.size()) fail(ErrorCode::LengthMismatch, "labels and scores differ in length");
  if (y.empty()) fail(ErrorCode::EmptyInput, "log-loss of zero rows");
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total += softplus(raw_scores[i]) - (y[i] == DefaultLabel::Default ? raw_scores[i] : 0.0);
  }
  return total / static_cast<double>(y.size());
}

BoostedEnsemble boost_fit(const LabeledDataset& train, const BoostParams& params) {
  params.validate();
  if (!train.has_both_classes()) fail(ErrorCode::SingleClassTrainingSet, "boosting needs both classes");
  const FeatureMatrix& x = train.features;
  const std::size_t n = train.size();
  const double prevalence = static_cast<double>(train.count(DefaultLabel::Default)) / static_cast<double>(n);

  BoostedEnsemble model;
  model.base_score = std::log(prevalence / (1.0 - prevalence));
  model.learning_rate = params.learning_rate;

  std::vector<double> f(n, model.base_score);
  std::vector<double> g(n);
  std::vector<double> h(n);
  model.loss_trace.push_back(log_loss(train.labels, f));

  std::optional<LevelWiseGrower> level;
  BinMapper mapper;
  BinnedMatrix binned;
  if (params.growth == Growth::LevelWise) {
    level.emplace(x);
  } else {
    mapper = BinMapper::fit(x, params.n_bins);
    binned = BinnedMatrix::build(x, mapper);
  }

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(f[i]);
      g[i] = p - (train.labels[i] == DefaultLabel::Default ? 1.0 : 0.0);
      h[i] = p * (1.0 - p);
    }
    Tree tree = level ? level->grow(g, h, params) : grow_tree_leaf_wise(binned, mapper, g, h, params);
    for (std::size_t i = 0; i < n; ++i) f[i] += params.learning_rate * tree.predict(x.row(i));
    model.trees.push_back(std::move(tree));
    model.loss_trace.push_back(log_loss(train.labels, f));
  }
  return model;
}

}  // namespace credrisk
