#include <doctest.h>

#include <cmath>
#include <numeric>

#include "credrisk/boosting.hpp"
#include "credrisk/error.hpp"
#include "support.hpp"

using namespace credrisk;
using credrisk::testing::make_dataset;

namespace {

std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

BoostParams leaf_wise(std::size_t num_leaves, std::size_t max_depth) {
  BoostParams p;
  p.growth = Growth::LeafWise;
  p.num_leaves = num_leaves;
  p.max_depth = max_depth;
  return p;
}

}  // namespace

TEST_CASE("newton gain and leaf weight") {
  CHECK(newton_gain(-2, 2, 2, 2, 0) == doctest::Approx(2.0));
  CHECK(leaf_weight(-3, 2, 1) == doctest::Approx(1.0));
}

TEST_CASE("histogram split on two bins") {
  const auto d = make_dataset({{0}, {0}, {1}, {1}}, {0, 0, 1, 1});
  const auto mapper = BinMapper::fit(d.features, 255);
  const auto binned = BinnedMatrix::build(d.features, mapper);
  const std::vector<double> g{-1, -1, 1, 1};
  const std::vector<double> h{1, 1, 1, 1};
  const auto s = best_split_histogram(binned, iota_rows(4), g, h, 0.0);
  REQUIRE(s.has_value());
  CHECK(s->bin == 0);
  CHECK(s->gain == doctest::Approx(2.0));
  CHECK(mapper.threshold(0, 0) == 0.5);
}

TEST_CASE("single bin has no split") {
  const auto d = make_dataset({{3}, {3}, {3}}, {0, 1, 0});
  const auto mapper = BinMapper::fit(d.features, 255);
  const auto binned = BinnedMatrix::build(d.features, mapper);
  const std::vector<double> g{-1, 1, -1};
  const std::vector<double> h{1, 1, 1};
  CHECK_FALSE(best_split_histogram(binned, iota_rows(3), g, h, 1.0).has_value());
}

TEST_CASE("histogram search equals exact search when every value has a bin") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(40);
    const std::size_t d = 1 + rng.index(3);
    const auto data = credrisk::testing::random_grid_dataset(rng, n, d, 2 + rng.index(10));
    std::vector<double> g(n);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = rng.uniform(-1.0, 1.0);
      h[i] = rng.uniform(0.1, 1.0);
    }
    const auto rows = iota_rows(n);
    const auto mapper = BinMapper::fit(data.features, 255);
    const auto binned = BinnedMatrix::build(data.features, mapper);
    const auto exact = best_split_newton_exact(data.features, rows, g, h, 1.0);
    const auto hist = best_split_histogram(binned, rows, g, h, 1.0);
    REQUIRE(exact.has_value() == hist.has_value());
    if (!exact) continue;
    CHECK(hist->gain == doctest::Approx(exact->gain).epsilon(1e-9));
    if (std::abs(hist->gain - exact->gain) > 1e-9 * (1 + exact->gain)) continue;
    CHECK(hist->feature == exact->feature);
    CHECK(mapper.threshold(hist->feature, hist->bin) == exact->threshold);
  }
}

TEST_CASE("quantile bins are ordered and bounded") {
  Rng rng(32);
  const auto data = credrisk::testing::random_dataset(rng, 500, 0, 2);
  const auto mapper = BinMapper::fit(data.features, 16);
  for (std::size_t f = 0; f < 2; ++f) {
    CHECK(mapper.bin_count(f) <= 16);
    const auto& e = mapper.edges(f);
    CHECK(std::is_sorted(e.begin(), e.end()));
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto b = mapper.bin(f, data.features(i, f));
      if (b > 0) CHECK(data.features(i, f) > e[b - 1]);
      if (b < e.size()) CHECK(data.features(i, f) <= e[b]);
    }
  }
}

TEST_CASE("level-wise tree leaf value for uniform gradients") {
  const auto d = make_dataset({{0}, {1}, {2}, {3}}, {0, 0, 0, 0});
  const std::vector<double> g(4, 0.5);
  const std::vector<double> h(4, 0.25);
  BoostParams p;
  p.lambda = 1.0;
  const auto tree = grow_tree_level_wise(d.features, g, h, p);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].value == doctest::Approx(-2.0 / (1.0 + 1.0)));
}

TEST_CASE("tree shape limits") {
  const auto data = credrisk::testing::synthetic_dataset(600, 0.2, 2);
  const std::size_t n = data.size();
  std::vector<double> g(n);
  std::vector<double> h(n, 0.25);
  for (std::size_t i = 0; i < n; ++i) g[i] = 0.5 - to_int(data.labels[i]);

  BoostParams stump;
  stump.max_depth = 1;
  CHECK(grow_tree_level_wise(data.features, g, h, stump).leaf_count() <= 2);

  const auto mapper = BinMapper::fit(data.features, 255);
  const auto binned = BinnedMatrix::build(data.features, mapper);
  const auto one = grow_tree_leaf_wise(binned, mapper, g, h, leaf_wise(1, 6));
  CHECK(one.leaf_count() == 1);
  const auto t = grow_tree_leaf_wise(binned, mapper, g, h, leaf_wise(31, 5));
  CHECK(t.leaf_count() <= 31);
  CHECK(t.depth() <= 5);
  CHECK(t.leaf_count() > 8);

  const std::vector<double> flat(n, 0.0);
  CHECK(grow_tree_leaf_wise(binned, mapper, flat, h, leaf_wise(31, 5)).leaf_count() == 1);
}

TEST_CASE("num_leaves must fit within the depth") {
  CHECK_THROWS_AS(leaf_wise(17, 4).validate(), Error);
  CHECK_NOTHROW(leaf_wise(16, 4).validate());
  try {
    leaf_wise(33, 5).validate();
    FAIL("expected InvalidHyperparameters");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidHyperparameters);
    CHECK(std::string(e.what()).find("2^max_depth") != std::string::npos);
  }
}

TEST_CASE("zero rounds score the prevalence") {
  const auto d = make_dataset({{0}, {1}, {2}, {3}}, {0, 0, 0, 1});
  BoostParams p;
  p.n_rounds = 0;
  const auto model = boost_fit(d, p);
  CHECK(model.loss_trace.size() == 1);
  const std::vector<double> x{1.0};
  CHECK(1.0 / (1.0 + std::exp(-model.raw_score(x))) == doctest::Approx(0.25));
}

TEST_CASE("one stump orders the two points") {
  const auto d = make_dataset({{0}, {1}}, {0, 1});
  BoostParams p;
  p.n_rounds = 1;
  p.max_depth = 1;
  p.learning_rate = 1.0;
  const auto model = boost_fit(d, p);
  const std::vector<double> x0{0.0};
  const std::vector<double> x1{1.0};
  CHECK(model.raw_score(x1) > model.raw_score(x0));
}

TEST_CASE("training loss trace falls for both growth modes") {
  const auto data = credrisk::testing::synthetic_dataset(800, 0.15, 4);
  for (Growth growth : {Growth::LevelWise, Growth::LeafWise}) {
    BoostParams p;
    p.n_rounds = 50;
    p.growth = growth;
    const auto model = boost_fit(data, p);
    REQUIRE(model.loss_trace.size() == 51);
    CHECK(model.loss_trace.back() < model.loss_trace[1]);
    std::vector<double> raw;
    for (std::size_t i = 0; i < data.size(); ++i) raw.push_back(model.raw_score(data.features.row(i)));
    CHECK(log_loss(data.labels, raw) == doctest::Approx(model.loss_trace.back()).epsilon(1e-12));
  }
}
