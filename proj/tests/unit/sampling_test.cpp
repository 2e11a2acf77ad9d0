#include <doctest.h>

#include <algorithm>
#include <set>

#include "credrisk/error.hpp"
#include "credrisk/sampling.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace credrisk;
using credrisk::testing::random_dataset;

namespace {

std::vector<std::vector<double>> minority_points(const LabeledDataset& data, DefaultLabel minority) {
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] == minority && !data.synthetic[i]) {
      const auto r = data.features.row(i);
      pts.emplace_back(r.begin(), r.end());
    }
  }
  return pts;
}

}  // namespace

TEST_CASE("stratified split keeps class proportions and order") {
  Rng rng(1);
  const auto data = random_dataset(rng, 90, 10, 3);
  const auto s = stratified_split(data, SplitConfig{});
  CHECK(s.train.size() == 70);
  CHECK(s.test.size() == 30);
  CHECK(s.train.count(DefaultLabel::Default) == 7);
  CHECK(s.test.count(DefaultLabel::Default) == 3);
  CHECK(std::is_sorted(s.train_indices.begin(), s.train_indices.end()));
  CHECK(std::is_sorted(s.test_indices.begin(), s.test_indices.end()));

  std::set<std::size_t> all(s.train_indices.begin(), s.train_indices.end());
  for (std::size_t i : s.test_indices) CHECK(all.insert(i).second);
  CHECK(all.size() == data.size());
  for (std::size_t k = 0; k < s.test_indices.size(); ++k) {
    CHECK(s.test.labels[k] == data.labels[s.test_indices[k]]);
  }
}

TEST_CASE("split is a deterministic function of the seed") {
  Rng rng(2);
  const auto data = random_dataset(rng, 50, 20, 2);
  SplitConfig cfg;
  const auto a = stratified_split(data, cfg);
  const auto b = stratified_split(data, cfg);
  CHECK(a.train_indices == b.train_indices);
  cfg.seed = 43;
  CHECK(stratified_split(data, cfg).train_indices != a.train_indices);
}

TEST_CASE("split rejects degenerate input") {
  const auto data = credrisk::testing::make_dataset({{0.0}, {1.0}, {2.0}}, {0, 0, 1});
  CHECK_THROWS_AS(stratified_split(data, SplitConfig{}), Error);
  SplitConfig bad;
  bad.train_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("smote balances and leaves originals untouched") {
  Rng rng(3);
  const auto data = random_dataset(rng, 80, 12, 4);
  const auto out = smote(data, SmoteConfig{});
  CHECK(out.count(DefaultLabel::Default) == 80);
  CHECK(out.count(DefaultLabel::Good) == 80);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK_FALSE(out.synthetic[i]);
    CHECK(std::ranges::equal(out.features.row(i), data.features.row(i)));
  }
  for (std::size_t i = data.size(); i < out.size(); ++i) {
    CHECK(out.synthetic[i]);
    CHECK(out.labels[i] == DefaultLabel::Default);
  }
}

TEST_CASE("smote samples lie on neighbour segments") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t minority = 8 + rng.index(20);
    const auto data = random_dataset(rng, minority * 3, minority, 1 + rng.index(5));
    SmoteConfig cfg;
    cfg.k_neighbors = 3;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto out = smote(data, cfg);
    const auto pts = minority_points(out, DefaultLabel::Default);
    std::vector<std::vector<std::size_t>> nn;
    for (std::size_t i = 0; i < pts.size(); ++i) nn.push_back(oracle::k_nearest(pts, i, cfg.k_neighbors));
    for (std::size_t i = data.size(); i < out.size(); ++i) {
      double best = 1e300;
      for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b : nn[a]) best = std::min(best, oracle::distance_to_segment(out.features.row(i), pts[a], pts[b]));
      }
      CHECK(best <= 1e-9);
    }
  }
}

TEST_CASE("nearest neighbours match brute force") {
  Rng rng(5);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({static_cast<double>(rng.index(4)), static_cast<double>(rng.index(4))});
  const auto nn = nearest_neighbors(pts, 4);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(nn[i] == oracle::k_nearest(pts, i, 4));
}

TEST_CASE("smote edge cases") {
  Rng rng(6);
  const auto tiny = random_dataset(rng, 20, 5, 2);
  try {
    smote(tiny, SmoteConfig{});
    FAIL("expected TooFewMinority");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewMinority);
  }
  const auto balanced = random_dataset(rng, 10, 10, 2);
  CHECK(smote(balanced, SmoteConfig{}).size() == 20);

  SmoteConfig half;
  half.target_ratio = 0.5;
  const auto data = random_dataset(rng, 60, 10, 2);
  CHECK(smote(data, half).count(DefaultLabel::Default) == 30);

  const auto a = smote(data, SmoteConfig{});
  const auto b = smote(data, SmoteConfig{});
  CHECK(a.features.values() == b.features.values());
}
