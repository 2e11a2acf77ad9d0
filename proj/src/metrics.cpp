#include "credrisk/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"

namespace credrisk {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorCode::LengthMismatch, "length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) fail(ErrorCode::EmptyInput, "no rows to evaluate");
}

}  // namespace

ConfusionMatrix confusion(std::span<const DefaultLabel> y_true, std::span<const DefaultLabel> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == DefaultLabel::Default;
    const bool p = y_pred[i] == DefaultLabel::Default;
    if (t && p) ++cm.tp;
    else if (!t && p) ++cm.fp;
    else if (t && !p) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double precision(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fp); }
double recall(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }
double accuracy(const ConfusionMatrix& cm) { return ratio(cm.tp + cm.tn, cm.total()); }
double false_positive_rate(const ConfusionMatrix& cm) { return ratio(cm.fp, cm.fp + cm.tn); }

double f1(const ConfusionMatrix& cm) {
  const double p = precision(cm);
  const double r = recall(cm);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

RocCurve roc_curve(std::span<const DefaultLabel> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) {
    fail(ErrorCode::LengthMismatch, "labels and scores differ in length");
  }
  std::size_t pos = 0;
  for (DefaultLabel y : y_true) pos += y == DefaultLabel::Default ? 1 : 0;
  const std::size_t neg = y_true.size() - pos;
  if (pos == 0 || neg == 0) fail(ErrorCode::SingleClassInput, "ROC curve needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (y_true[order[i]] == DefaultLabel::Default) ++tp;
      else ++fp;
      ++i;
    }
    curve.points.push_back({ratio(fp, neg), ratio(tp, pos)});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "fpr,tpr\n";
  for (const auto& p : curve.points) out << csv::format_double(p.fpr) << ',' << csv::format_double(p.tpr) << '\n';
}

ClassificationReport classification_report(std::span<const DefaultLabel> y_true,
                                            std::span<const DefaultLabel> y_pred) {
  const ConfusionMatrix cm = confusion(y_true, y_pred);
  // Class 0 as positive swaps the roles of the cells.
  const ConfusionMatrix flipped{cm.tn, cm.fn, cm.fp, cm.tp};
  ClassificationReport report;
  report.per_class[1] = {precision(cm), recall(cm), f1(cm), cm.tp + cm.fn};
  report.per_class[0] = {precision(flipped), recall(flipped), f1(flipped), cm.tn + cm.fp};
  report.accuracy = accuracy(cm);
  report.total = cm.total();
  return report;
}

}  // namespace credrisk
