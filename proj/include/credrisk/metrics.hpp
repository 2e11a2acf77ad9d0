#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "credrisk/schema.hpp"

namespace credrisk {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Positive class is label 1.
ConfusionMatrix confusion(std::span<const DefaultLabel> y_true, std::span<const DefaultLabel> y_pred);

// A zero denominator yields 0.
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double f1(const ConfusionMatrix& cm);
double accuracy(const ConfusionMatrix& cm);
double false_positive_rate(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

// Threshold sweep over distinct scores in descending order; rows with equal
// scores move together.
RocCurve roc_curve(std::span<const DefaultLabel> y_true, std::span<const double> scores);

// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

void write_roc_csv(std::ostream& out, const RocCurve& curve);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassificationReport {
  std::array<ClassMetrics, 2> per_class;  // index = label
  double accuracy = 0.0;
  std::size_t total = 0;

  const ClassMetrics& positive() const { return per_class[1]; }
};

ClassificationReport classification_report(std::span<const DefaultLabel> y_true,
                                            std::span<const DefaultLabel> y_pred);

}  // namespace credrisk
