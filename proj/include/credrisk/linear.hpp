#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "credrisk/ingest.hpp"

namespace credrisk {

// z-score statistics from training data; zero-variance columns keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Standardizer fit(const FeatureMatrix& x);
  void apply(std::span<const double> row, std::span<double> out) const;
  FeatureMatrix transform(const FeatureMatrix& x) const;
};

double sigmoid(double z);

// ---------------------------------------------------------------------------
// Logistic regression: log(p / (1 - p)) = b0 + x.b

struct LogisticParams {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  double l2 = 0.0;

  void validate() const;
};

// theta = [b0, b1..bd]. Mean log-loss over rows plus (l2/2)|b|^2; the
// intercept is not penalised.
double logistic_loss(std::span<const double> theta, const FeatureMatrix& x, std::span<const DefaultLabel> y,
                     double l2);
std::vector<double> logistic_gradient(std::span<const double> theta, const FeatureMatrix& x,
                                      std::span<const DefaultLabel> y, double l2);

struct LogisticModel {
  Standardizer scaler;
  double intercept = 0.0;
  std::vector<double> weights;

  double score(std::span<const double> row) const;
};

LogisticModel fit_logistic(const LabeledDataset& train, const LogisticParams& params);

// ---------------------------------------------------------------------------
// Support vector machine trained by stochastic subgradient descent on the
// hinge loss with L2 penalty lambda = 1 / (C n).

enum class SvmKernel { Linear, Rbf };

struct SvmParams {
  double c = 1.0;
  std::optional<double> gamma;  // defaults to 1 / d at fit time
  std::size_t epochs = 5;
  SvmKernel kernel = SvmKernel::Rbf;

  void validate() const;
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

struct SvmModel {
  Standardizer scaler;
  SvmKernel kernel = SvmKernel::Rbf;
  double gamma = 1.0;
  // Linear: weights over standardized features plus a trailing bias term.
  std::vector<double> weights;
  // Kernel: decision(x) = sum_j coef[j] * (K(sv_j, x) + 1).
  std::vector<double> support;  // row-major standardized support vectors
  std::vector<double> coef;

  double decision(std::span<const double> row) const;
  double score(std::span<const double> row) const { return sigmoid(decision(row)); }
};

SvmModel fit_svm(const LabeledDataset& train, const SvmParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------
// k-nearest neighbours on standardized features.

struct KnnParams {
  std::size_t k = 5;

  void validate() const;
};

struct KnnModel {
  Standardizer scaler;
  std::size_t k = 5;
  std::size_t dims = 0;
  std::vector<double> points;  // row-major standardized training rows
  std::vector<DefaultLabel> labels;

  // Fraction of label-1 rows among the k nearest; distance ties go to the
  // lower training index.
  double score(std::span<const double> row) const;
};

KnnModel fit_knn(const LabeledDataset& train, const KnnParams& params);

}  // namespace credrisk
