#include "credrisk/linear.hpp"

#include <algorithm>
#include <cmath>

#include "credrisk/error.hpp"
#include "credrisk/random.hpp"

namespace credrisk {

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

double target(DefaultLabel y) { return y == DefaultLabel::Default ? 1.0 : 0.0; }

void require_both_classes(const LabeledDataset& train, const char* what) {
  if (train.size() == 0 || train.features.cols() == 0) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " needs at least one row and one column");
  }
  if (!train.has_both_classes()) fail(ErrorCode::SingleClassTrainingSet, std::string(what) + " needs both classes");
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  Standardizer s;
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x(i, j);
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - m) * (x(i, j) - m);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[j] = m;
    s.stddev[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> row, std::span<double> out) const {
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / stddev[j];
}

FeatureMatrix Standardizer::transform(const FeatureMatrix& x) const {
  std::vector<double> values(x.values().size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    apply(x.row(i), std::span<double>(values.data() + i * x.cols(), x.cols()));
  }
  return FeatureMatrix(x.column_names(), std::move(values));
}

// ---------------------------------------------------------------------------

void LogisticParams::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorCode::InvalidHyperparameters, "logistic learning_rate must be > 0");
  if (epochs < 1) fail(ErrorCode::InvalidHyperparameters, "logistic epochs must be >= 1");
  if (!(l2 >= 0.0)) fail(ErrorCode::InvalidHyperparameters, "logistic l2 must be >= 0");
}

double logistic_loss(std::span<const double> theta, const FeatureMatrix& x, std::span<const DefaultLabel> y,
                     double l2) {
  const std::size_t d = x.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double z = theta[0];
    for (std::size_t j = 0; j < d; ++j) z += theta[j + 1] * x(i, j);
    total += softplus(z) - target(y[i]) * z;
  }
  double penalty = 0.0;
  for (std::size_t j = 0; j < d; ++j) penalty += theta[j + 1] * theta[j + 1];
  return total / static_cast<double>(x.rows()) + 0.5 * l2 * penalty;
}

std::vector<double> logistic_gradient(std::span<const double> theta, const FeatureMatrix& x,
                                      std::span<const DefaultLabel> y, double l2) {
  const std::size_t d = x.cols();
  std::vector<double> grad(d + 1, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double z = theta[0];
    for (std::size_t j = 0; j < d; ++j) z += theta[j + 1] * x(i, j);
    const double r = sigmoid(z) - target(y[i]);
    grad[0] += r;
    for (std::size_t j = 0; j < d; ++j) grad[j + 1] += r * x(i, j);
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (double& gj : grad) gj *= inv_n;
  for (std::size_t j = 0; j < d; ++j) grad[j + 1] += l2 * theta[j + 1];
  return grad;
}

double LogisticModel::score(std::span<const double> row) const {
  double z = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * (row[j] - scaler.mean[j]) / scaler.stddev[j];
  return sigmoid(z);
}

LogisticModel fit_logistic(const LabeledDataset& train, const LogisticParams& params) {
  params.validate();
  require_both_classes(train, "logistic regression");
  LogisticModel model;
  model.scaler = Standardizer::fit(train.features);
  const FeatureMatrix z = model.scaler.transform(train.features);
  std::vector<double> theta(z.cols() + 1, 0.0);
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const auto grad = logistic_gradient(theta, z, train.labels, params.l2);
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= params.learning_rate * grad[j];
  }
  model.intercept = theta[0];
  model.weights.assign(theta.begin() + 1, theta.end());
  return model;
}

// ---------------------------------------------------------------------------

void SvmParams::validate() const {
  if (!(c > 0.0)) fail(ErrorCode::InvalidHyperparameters, "SVM C must be > 0");
  if (gamma && !(*gamma > 0.0)) fail(ErrorCode::InvalidHyperparameters, "SVM gamma must be > 0");
  if (epochs < 1) fail(ErrorCode::InvalidHyperparameters, "SVM epochs must be >= 1");
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    d2 += diff * diff;
  }
  return std::exp(-gamma * d2);
}

double SvmModel::decision(std::span<const double> row) const {
  const std::size_t d = scaler.mean.size();
  std::vector<double> z(d);
  scaler.apply(row, z);
  if (kernel == SvmKernel::Linear) {
    double f = weights[d];
    for (std::size_t j = 0; j < d; ++j) f += weights[j] * z[j];
    return f;
  }
  double f = 0.0;
  for (std::size_t s = 0; s < coef.size(); ++s) {
    f += coef[s] * (rbf_kernel(std::span<const double>(support.data() + s * d, d), z, gamma) + 1.0);
  }
  return f;
}

SvmModel fit_svm(const LabeledDataset& train, const SvmParams& params, std::uint64_t seed) {
  params.validate();
  require_both_classes(train, "SVM");
  const std::size_t n = train.size();
  const std::size_t d = train.features.cols();

  SvmModel model;
  model.kernel = params.kernel;
  model.gamma = params.gamma.value_or(1.0 / static_cast<double>(d));
  model.scaler = Standardizer::fit(train.features);
  const FeatureMatrix z = model.scaler.transform(train.features);
  auto sign = [&](std::size_t i) { return train.labels[i] == DefaultLabel::Default ? 1.0 : -1.0; };

  const double lambda = 1.0 / (params.c * static_cast<double>(n));
  const std::size_t steps = params.epochs * n;
  Rng rng(seed);

  if (params.kernel == SvmKernel::Linear) {
    // The constant trailing input acts as a (regularised) bias.
    std::vector<double> w(d + 1, 0.0);
    for (std::size_t t = 1; t <= steps; ++t) {
      const std::size_t i = rng.index(n);
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      auto xi = z.row(i);
      double margin = w[d];
      for (std::size_t j = 0; j < d; ++j) margin += w[j] * xi[j];
      margin *= sign(i);
      const double shrink = 1.0 - 1.0 / static_cast<double>(t);
      for (double& wj : w) wj *= shrink;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < d; ++j) w[j] += eta * sign(i) * xi[j];
        w[d] += eta * sign(i);
      }
    }
    model.weights = std::move(w);
    return model;
  }

  // Kernelized Pegasos: alpha[i] counts margin violations of row i.
  std::vector<std::size_t> alpha(n, 0);
  std::vector<std::size_t> active;
  for (std::size_t t = 1; t <= steps; ++t) {
    const std::size_t i = rng.index(n);
    auto xi = z.row(i);
    double f = 0.0;
    for (std::size_t j : active) {
      f += static_cast<double>(alpha[j]) * sign(j) * (rbf_kernel(z.row(j), xi, model.gamma) + 1.0);
    }
    f /= lambda * static_cast<double>(t);
    if (sign(i) * f < 1.0) {
      if (alpha[i] == 0) active.push_back(i);
      ++alpha[i];
    }
  }
  std::sort(active.begin(), active.end());
  const double scale = 1.0 / (lambda * static_cast<double>(steps));
  for (std::size_t j : active) {
    auto row = z.row(j);
    model.support.insert(model.support.end(), row.begin(), row.end());
    model.coef.push_back(static_cast<double>(alpha[j]) * sign(j) * scale);
  }
  return model;
}

// ---------------------------------------------------------------------------

void KnnParams::validate() const {
  if (k < 1) fail(ErrorCode::InvalidHyperparameters, "KNN k must be >= 1");
}

double KnnModel::score(std::span<const double> row) const {
  std::vector<double> z(dims);
  scaler.apply(row, z);
  const std::size_t n = labels.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    const double* p = points.data() + i * dims;
    for (std::size_t j = 0; j < dims; ++j) {
      const double diff = p[j] - z[j];
      d2 += diff * diff;
    }
    dist[i] = {d2, i};
  }
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
  std::size_t positives = 0;
  for (std::size_t r = 0; r < k; ++r) positives += labels[dist[r].second] == DefaultLabel::Default ? 1 : 0;
  return static_cast<double>(positives) / static_cast<double>(k);
}

KnnModel fit_knn(const LabeledDataset& train, const KnnParams& params) {
  params.validate();
  require_both_classes(train, "KNN");
  if (params.k > train.size()) {
    fail(ErrorCode::InvalidHyperparameters, "KNN k exceeds the training size");
  }
  KnnModel model;
  model.k = params.k;
  model.dims = train.features.cols();
  model.scaler = Standardizer::fit(train.features);
  model.points = model.scaler.transform(train.features).values();
  model.labels = train.labels;
  return model;
}

}  // namespace credrisk
