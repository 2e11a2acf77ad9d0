#include <doctest.h>

#include <cmath>

#include "credrisk/error.hpp"
#include "credrisk/linear.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace credrisk;
using credrisk::testing::make_dataset;

TEST_CASE("standardizer centres and scales") {
  const auto d = make_dataset({{1, 5}, {3, 5}, {5, 5}}, {0, 1, 0});
  const auto s = Standardizer::fit(d.features);
  CHECK(s.mean[0] == doctest::Approx(3.0));
  CHECK(s.stddev[1] == 1.0);
  const auto t = s.transform(d.features);
  CHECK(t(0, 0) == doctest::Approx(-t(2, 0)));
  CHECK(t(1, 0) == 0.0);
  CHECK(t(0, 1) == 0.0);
}

TEST_CASE("sigmoid is stable at the extremes") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(-800.0) >= 0.0);
}

TEST_CASE("logistic gradient matches central differences") {
  Rng rng(41);
  const auto data = credrisk::testing::random_dataset(rng, 30, 20, 3);
  for (double l2 : {0.0, 0.3}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> theta(4);
      for (double& t : theta) t = rng.uniform(-2.0, 2.0);
      const auto g = logistic_gradient(theta, data.features, data.labels, l2);
      const auto f = [&](const std::vector<double>& t) { return logistic_loss(t, data.features, data.labels, l2); };
      const auto num = oracle::numeric_gradient(f, theta);
      for (std::size_t i = 0; i < theta.size(); ++i) CHECK(g[i] == doctest::Approx(num[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("logistic separates separable data") {
  const auto d = make_dataset({{0, 0}, {1, 0}, {0, 1}, {3, 3}, {4, 3}, {3, 4}}, {0, 0, 0, 1, 1, 1});
  const auto m = fit_logistic(d, LogisticParams{});
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK((m.score(d.features.row(i)) >= 0.5) == (d.labels[i] == DefaultLabel::Default));
  }
}

TEST_CASE("zero coefficients score one half") {
  LogisticModel m;
  m.scaler.mean = {0.0, 0.0};
  m.scaler.stddev = {1.0, 1.0};
  m.weights = {0.0, 0.0};
  const std::vector<double> x{3.0, -7.0};
  CHECK(m.score(x) == 0.5);
}

TEST_CASE("rbf kernel") {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{2.0, 3.0};
  CHECK(rbf_kernel(a, a, 0.3) == 1.0);
  CHECK(rbf_kernel(a, b, 0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(rbf_kernel(a, b, 0.5) == doctest::Approx(0.367879).epsilon(1e-6));
}

TEST_CASE("svm on separable data") {
  Rng rng(42);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (rows.size() < 80) {
    const double x = rng.uniform(-3.0, 3.0);
    const double y = rng.uniform(-3.0, 3.0);
    const double margin = x + 2.0 * y - 0.5;
    if (std::abs(margin) < 0.5) continue;
    rows.push_back({x, y});
    labels.push_back(margin > 0 ? 1 : 0);
  }
  const auto d = make_dataset(rows, labels);
  for (SvmKernel kernel : {SvmKernel::Linear, SvmKernel::Rbf}) {
    SvmParams p;
    p.kernel = kernel;
    p.c = 100.0;
    p.epochs = 50;
    const auto m = fit_svm(d, p, 7);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double s = m.score(d.features.row(i));
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      correct += (m.decision(d.features.row(i)) > 0) == (labels[i] == 1) ? 1 : 0;
    }
    if (kernel == SvmKernel::Linear) {
      CHECK(correct == d.size());
    } else {
      CHECK(correct >= d.size() * 95 / 100);
    }
  }
}

TEST_CASE("svm params validate") {
  SvmParams p;
  p.c = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("knn score is the neighbour fraction") {
  const auto d = make_dataset({{0.0}, {1.0}, {2.0}, {10.0}, {11.0}}, {1, 1, 0, 0, 0});
  KnnParams p;
  p.k = 3;
  const auto m = fit_knn(d, p);
  const std::vector<double> q{0.9};
  CHECK(m.score(q) == doctest::Approx(2.0 / 3.0));
  p.k = 6;
  CHECK_THROWS_AS(fit_knn(d, p), Error);
}
