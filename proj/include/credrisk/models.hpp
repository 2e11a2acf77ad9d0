#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "credrisk/boosting.hpp"
#include "credrisk/ingest.hpp"
#include "credrisk/linear.hpp"
#include "credrisk/tree.hpp"

namespace credrisk {

enum class ClassifierKind { Logistic, Svm, Knn, DecisionTree, RandomForest, XgbBoost, LgbmBoost };

inline constexpr std::array<ClassifierKind, 7> kAllClassifierKinds = {
    ClassifierKind::Logistic,     ClassifierKind::Svm,      ClassifierKind::Knn,       ClassifierKind::DecisionTree,
    ClassifierKind::RandomForest, ClassifierKind::XgbBoost, ClassifierKind::LgbmBoost,
};

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

struct ForestParams {
  std::size_t n_trees = 100;
  TreeParams tree;
  std::optional<std::size_t> feature_subsample;  // defaults to ceil(sqrt(d))
  bool bootstrap = true;

  void validate() const;
};

using Hyperparameters = std::variant<LogisticParams, SvmParams, KnnParams, TreeParams, ForestParams, BoostParams>;

// Classifier kind, its hyperparameters and seed. Construction validates the
// hyperparameters and throws InvalidHyperparameters on violations.
class ClassifierSpec {
 public:
  ClassifierSpec(ClassifierKind kind, Hyperparameters params, std::uint64_t seed = 42);

  static ClassifierSpec defaults(ClassifierKind kind, std::uint64_t seed = 42);

  ClassifierKind kind() const { return kind_; }
  const Hyperparameters& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  // Returns a copy with one hyperparameter overridden, e.g. ("num_leaves",
  // "15"). Unknown keys and unparsable values are InvalidHyperparameters.
  ClassifierSpec with(std::string_view key, std::string_view value) const;
  ClassifierSpec with_seed(std::uint64_t seed) const { return ClassifierSpec(kind_, params_, seed); }

 private:
  ClassifierKind kind_;
  Hyperparameters params_;
  std::uint64_t seed_;
};

struct TreeModel {
  Tree tree;
};

struct ForestModel {
  std::vector<Tree> trees;
};

using ModelPayload = std::variant<LogisticModel, SvmModel, KnnModel, TreeModel, ForestModel, BoostedEnsemble>;

// Fitted classifier. Immutable; scoring never changes it.
class TrainedModel {
 public:
  TrainedModel(ClassifierSpec spec, std::vector<std::string> feature_names, ModelPayload payload);

  ClassifierKind kind() const { return spec_.kind(); }
  const ClassifierSpec& spec() const { return spec_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const ModelPayload& payload() const { return payload_; }

  // Score of one row already in training column order.
  double score_row(std::span<const double> row) const;

 private:
  ClassifierSpec spec_;
  std::vector<std::string> feature_names_;
  ModelPayload payload_;
};

TrainedModel fit(const ClassifierSpec& spec, const LabeledDataset& train);

// One probability-like score in [0, 1] per row. Columns must match the
// training columns by name and order (ColumnMismatch otherwise).
std::vector<double> score(const TrainedModel& model, const FeatureMatrix& features);

// Label 1 iff score >= threshold.
std::vector<DefaultLabel> predict(const TrainedModel& model, const FeatureMatrix& features, double threshold = 0.5);
std::vector<DefaultLabel> threshold_scores(std::span<const double> scores, double threshold);

ForestModel fit_forest(const LabeledDataset& train, const ForestParams& params, std::uint64_t seed);
TreeModel fit_decision_tree(const LabeledDataset& train, const TreeParams& params, std::uint64_t seed);

}  // namespace credrisk
