#include "credrisk/models.hpp"

#include <cmath>

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"
#include "credrisk/random.hpp"

namespace credrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  fail(ErrorCode::InvalidHyperparameters, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

double as_double(std::string_view key, std::string_view value) {
  auto v = csv::parse_double(value);
  if (!v) bad_value(key, value);
  return *v;
}

std::size_t as_count(std::string_view key, std::string_view value) {
  auto v = csv::parse_int(value);
  if (!v || *v < 0) bad_value(key, value);
  return static_cast<std::size_t>(*v);
}

bool as_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  bad_value(key, value);
}

bool set_tree_param(TreeParams& p, std::string_view key, std::string_view value) {
  if (key == "max_depth") p.max_depth = as_count(key, value);
  else if (key == "min_samples_split") p.min_samples_split = as_count(key, value);
  else if (key == "min_gain") p.min_gain = as_double(key, value);
  else return false;
  return true;
}

[[noreturn]] void unknown_key(ClassifierKind kind, std::string_view key) {
  fail(ErrorCode::InvalidHyperparameters,
       "unknown hyperparameter '" + std::string(key) + "' for " + std::string(to_string(kind)));
}

void require_trainable(const LabeledDataset& train) {
  if (train.size() == 0 || train.features.cols() == 0) {
    fail(ErrorCode::InvalidArgument, "training set needs at least one row and one column");
  }
  if (!train.has_both_classes()) fail(ErrorCode::SingleClassTrainingSet, "training set holds a single class");
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Logistic: return "logistic";
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::DecisionTree: return "decision_tree";
    case ClassifierKind::RandomForest: return "random_forest";
    case ClassifierKind::XgbBoost: return "xgb_boost";
    case ClassifierKind::LgbmBoost: return "lgbm_boost";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  for (ClassifierKind k : kAllClassifierKinds) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorCode::InvalidArgument, "unknown model kind '" + std::string(name) + "'");
}

void ForestParams::validate() const {
  if (n_trees < 1) fail(ErrorCode::InvalidHyperparameters, "n_trees must be >= 1");
  if (feature_subsample && *feature_subsample < 1) {
    fail(ErrorCode::InvalidHyperparameters, "feature_subsample must be >= 1");
  }
  tree.validate();
}

// ---------------------------------------------------------------------------
// ClassifierSpec

ClassifierSpec::ClassifierSpec(ClassifierKind kind, Hyperparameters params, std::uint64_t seed)
    : kind_(kind), params_(std::move(params)), seed_(seed) {
  auto mismatch = [&] {
    fail(ErrorCode::InvalidHyperparameters, "hyperparameter set does not match kind " + std::string(to_string(kind_)));
  };
  switch (kind_) {
    case ClassifierKind::Logistic:
      if (!std::holds_alternative<LogisticParams>(params_)) mismatch();
      break;
    case ClassifierKind::Svm:
      if (!std::holds_alternative<SvmParams>(params_)) mismatch();
      break;
    case ClassifierKind::Knn:
      if (!std::holds_alternative<KnnParams>(params_)) mismatch();
      break;
    case ClassifierKind::DecisionTree:
      if (!std::holds_alternative<TreeParams>(params_)) mismatch();
      break;
    case ClassifierKind::RandomForest:
      if (!std::holds_alternative<ForestParams>(params_)) mismatch();
      break;
    case ClassifierKind::XgbBoost:
    case ClassifierKind::LgbmBoost: {
      const auto* boost = std::get_if<BoostParams>(&params_);
      if (boost == nullptr) mismatch();
      const Growth expected = kind_ == ClassifierKind::XgbBoost ? Growth::LevelWise : Growth::LeafWise;
      if (boost->growth != expected) mismatch();
      break;
    }
  }
  std::visit([](const auto& p) { p.validate(); }, params_);
}

ClassifierSpec ClassifierSpec::defaults(ClassifierKind kind, std::uint64_t seed) {
  switch (kind) {
    case ClassifierKind::Logistic: return {kind, LogisticParams{}, seed};
    case ClassifierKind::Svm: return {kind, SvmParams{}, seed};
    case ClassifierKind::Knn: return {kind, KnnParams{}, seed};
    case ClassifierKind::DecisionTree: return {kind, TreeParams{}, seed};
    case ClassifierKind::RandomForest: return {kind, ForestParams{}, seed};
    case ClassifierKind::XgbBoost: {
      BoostParams p;
      p.growth = Growth::LevelWise;
      return {kind, p, seed};
    }
    case ClassifierKind::LgbmBoost: {
      BoostParams p;
      p.growth = Growth::LeafWise;
      return {kind, p, seed};
    }
  }
  fail(ErrorCode::Internal, "unhandled classifier kind");
}

ClassifierSpec ClassifierSpec::with(std::string_view key, std::string_view value) const {
  Hyperparameters params = params_;
  const ClassifierKind kind = kind_;
  std::visit(overloaded{
                 [&](LogisticParams& p) {
                   if (key == "learning_rate") p.learning_rate = as_double(key, value);
                   else if (key == "epochs") p.epochs = as_count(key, value);
                   else if (key == "l2") p.l2 = as_double(key, value);
                   else unknown_key(kind, key);
                 },
                 [&](SvmParams& p) {
                   if (key == "c") p.c = as_double(key, value);
                   else if (key == "gamma") p.gamma = as_double(key, value);
                   else if (key == "epochs") p.epochs = as_count(key, value);
                   else if (key == "kernel") {
                     if (value == "linear") p.kernel = SvmKernel::Linear;
                     else if (value == "rbf") p.kernel = SvmKernel::Rbf;
                     else bad_value(key, value);
                   } else unknown_key(kind, key);
                 },
                 [&](KnnParams& p) {
                   if (key == "k") p.k = as_count(key, value);
                   else unknown_key(kind, key);
                 },
                 [&](TreeParams& p) {
                   if (!set_tree_param(p, key, value)) unknown_key(kind, key);
                 },
                 [&](ForestParams& p) {
                   if (key == "n_trees") p.n_trees = as_count(key, value);
                   else if (key == "feature_subsample") p.feature_subsample = as_count(key, value);
                   else if (key == "bootstrap") p.bootstrap = as_bool(key, value);
                   else if (!set_tree_param(p.tree, key, value)) unknown_key(kind, key);
                 },
                 [&](BoostParams& p) {
                   if (key == "n_rounds") p.n_rounds = as_count(key, value);
                   else if (key == "learning_rate") p.learning_rate = as_double(key, value);
                   else if (key == "max_depth") p.max_depth = as_count(key, value);
                   else if (key == "num_leaves") p.num_leaves = as_count(key, value);
                   else if (key == "lambda") p.lambda = as_double(key, value);
                   else if (key == "n_bins") p.n_bins = as_count(key, value);
                   else unknown_key(kind, key);
                 },
             },
             params);
  return ClassifierSpec(kind_, std::move(params), seed_);
}

// ---------------------------------------------------------------------------
// TrainedModel

TrainedModel::TrainedModel(ClassifierSpec spec, std::vector<std::string> feature_names, ModelPayload payload)
    : spec_(std::move(spec)), feature_names_(std::move(feature_names)), payload_(std::move(payload)) {}

double TrainedModel::score_row(std::span<const double> row) const {
  return std::visit(overloaded{
                        [&](const LogisticModel& m) { return m.score(row); },
                        [&](const SvmModel& m) { return m.score(row); },
                        [&](const KnnModel& m) { return m.score(row); },
                        [&](const TreeModel& m) { return m.tree.predict(row); },
                        [&](const ForestModel& m) {
                          double sum = 0.0;
                          for (const Tree& t : m.trees) sum += t.predict(row);
                          return sum / static_cast<double>(m.trees.size());
                        },
                        [&](const BoostedEnsemble& m) { return sigmoid(m.raw_score(row)); },
                    },
                    payload_);
}

TreeModel fit_decision_tree(const LabeledDataset& train, const TreeParams& params, std::uint64_t seed) {
  require_trainable(train);
  std::vector<std::size_t> rows(train.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  Rng rng(mix_seed(seed, 0));
  return {fit_classification_tree(train.features, train.labels, rows, params, train.features.cols(), rng)};
}

ForestModel fit_forest(const LabeledDataset& train, const ForestParams& params, std::uint64_t seed) {
  params.validate();
  require_trainable(train);
  const std::size_t n = train.size();
  const std::size_t d = train.features.cols();
  const std::size_t per_split = std::min(
      d, params.feature_subsample.value_or(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))));
  ForestModel forest;
  forest.trees.reserve(params.n_trees);
  std::vector<std::size_t> rows(n);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    // Each tree owns a seed stream, so the ensemble does not depend on
    // the order trees are grown in.
    Rng rng(mix_seed(seed, t));
    for (std::size_t i = 0; i < n; ++i) rows[i] = params.bootstrap ? rng.index(n) : i;
    forest.trees.push_back(fit_classification_tree(train.features, train.labels, rows, params.tree, per_split, rng));
  }
  return forest;
}

TrainedModel fit(const ClassifierSpec& spec, const LabeledDataset& train) {
  require_trainable(train);
  const std::uint64_t seed = spec.seed();
  ModelPayload payload = std::visit(
      overloaded{
          [&](const LogisticParams& p) -> ModelPayload { return fit_logistic(train, p); },
          [&](const SvmParams& p) -> ModelPayload { return fit_svm(train, p, seed); },
          [&](const KnnParams& p) -> ModelPayload { return fit_knn(train, p); },
          [&](const TreeParams& p) -> ModelPayload { return fit_decision_tree(train, p, seed); },
          [&](const ForestParams& p) -> ModelPayload { return fit_forest(train, p, seed); },
          [&](const BoostParams& p) -> ModelPayload { return boost_fit(train, p); },
      },
      spec.params());
  return TrainedModel(spec, train.features.column_names(), std::move(payload));
}

std::vector<double> score(const TrainedModel& model, const FeatureMatrix& features) {
  if (features.column_names() != model.feature_names()) {
    fail(ErrorCode::ColumnMismatch, "feature columns differ from the columns the model was trained on");
  }
  std::vector<double> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out[i] = model.score_row(features.row(i));
  return out;
}

std::vector<DefaultLabel> threshold_scores(std::span<const double> scores, double threshold) {
  std::vector<DefaultLabel> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = scores[i] >= threshold ? DefaultLabel::Default : DefaultLabel::Good;
  }
  return out;
}

std::vector<DefaultLabel> predict(const TrainedModel& model, const FeatureMatrix& features, double threshold) {
  const auto s = score(model, features);
  return threshold_scores(s, threshold);
}

}  // namespace credrisk
