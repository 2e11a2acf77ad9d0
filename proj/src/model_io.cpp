#include "credrisk/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "credrisk/error.hpp"

namespace credrisk {

namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kFormat = "credrisk-model";
constexpr int kVersion = 1;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json tree_params_json(const TreeParams& p) {
  return {{"max_depth", p.max_depth}, {"min_samples_split", p.min_samples_split}, {"min_gain", p.min_gain}};
}

TreeParams tree_params_from(const json& j) {
  TreeParams p;
  p.max_depth = j.at("max_depth").get<std::size_t>();
  p.min_samples_split = j.at("min_samples_split").get<std::size_t>();
  p.min_gain = j.at("min_gain").get<double>();
  return p;
}

json hyperparameters_json(const Hyperparameters& params) {
  return std::visit(
      overloaded{
          [](const LogisticParams& p) -> json {
            return {{"learning_rate", p.learning_rate}, {"epochs", p.epochs}, {"l2", p.l2}};
          },
          [](const SvmParams& p) -> json {
            json j = {{"c", p.c}, {"epochs", p.epochs}, {"kernel", p.kernel == SvmKernel::Linear ? "linear" : "rbf"}};
            j["gamma"] = p.gamma ? json(*p.gamma) : json(nullptr);
            return j;
          },
          [](const KnnParams& p) -> json { return {{"k", p.k}}; },
          [](const TreeParams& p) -> json { return tree_params_json(p); },
          [](const ForestParams& p) -> json {
            json j = {{"n_trees", p.n_trees}, {"tree", tree_params_json(p.tree)}, {"bootstrap", p.bootstrap}};
            j["feature_subsample"] = p.feature_subsample ? json(*p.feature_subsample) : json(nullptr);
            return j;
          },
          [](const BoostParams& p) -> json {
            return {{"n_rounds", p.n_rounds},   {"learning_rate", p.learning_rate},
                    {"max_depth", p.max_depth}, {"num_leaves", p.num_leaves},
                    {"lambda", p.lambda},       {"n_bins", p.n_bins},
                    {"growth", p.growth == Growth::LeafWise ? "leaf_wise" : "level_wise"}};
          },
      },
      params);
}

Hyperparameters hyperparameters_from(ClassifierKind kind, const json& j) {
  switch (kind) {
    case ClassifierKind::Logistic: {
      LogisticParams p;
      p.learning_rate = j.at("learning_rate").get<double>();
      p.epochs = j.at("epochs").get<std::size_t>();
      p.l2 = j.at("l2").get<double>();
      return p;
    }
    case ClassifierKind::Svm: {
      SvmParams p;
      p.c = j.at("c").get<double>();
      p.epochs = j.at("epochs").get<std::size_t>();
      p.kernel = j.at("kernel").get<std::string>() == "linear" ? SvmKernel::Linear : SvmKernel::Rbf;
      if (!j.at("gamma").is_null()) p.gamma = j.at("gamma").get<double>();
      return p;
    }
    case ClassifierKind::Knn: {
      KnnParams p;
      p.k = j.at("k").get<std::size_t>();
      return p;
    }
    case ClassifierKind::DecisionTree: return tree_params_from(j);
    case ClassifierKind::RandomForest: {
      ForestParams p;
      p.n_trees = j.at("n_trees").get<std::size_t>();
      p.tree = tree_params_from(j.at("tree"));
      p.bootstrap = j.at("bootstrap").get<bool>();
      if (!j.at("feature_subsample").is_null()) p.feature_subsample = j.at("feature_subsample").get<std::size_t>();
      return p;
    }
    case ClassifierKind::XgbBoost:
    case ClassifierKind::LgbmBoost: {
      BoostParams p;
      p.n_rounds = j.at("n_rounds").get<std::size_t>();
      p.learning_rate = j.at("learning_rate").get<double>();
      p.max_depth = j.at("max_depth").get<std::size_t>();
      p.num_leaves = j.at("num_leaves").get<std::size_t>();
      p.lambda = j.at("lambda").get<double>();
      p.n_bins = j.at("n_bins").get<std::size_t>();
      p.growth = j.at("growth").get<std::string>() == "leaf_wise" ? Growth::LeafWise : Growth::LevelWise;
      return p;
    }
  }
  fail(ErrorCode::ModelFormat, "unhandled model kind");
}

json tree_json(const Tree& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array();
  for (const TreeNode& n : t.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

Tree tree_from(const json& j, std::size_t dims) {
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
    fail(ErrorCode::ModelFormat, "tree node arrays are empty or differ in length");
  }
  Tree t;
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.nodes[i] = TreeNode{feature[i], threshold[i], left[i], right[i], value[i]};
    if (feature[i] >= 0) {
      const auto ok = [&](std::int32_t c) { return c > static_cast<std::int32_t>(i) && c < static_cast<std::int32_t>(n); };
      if (!ok(left[i]) || !ok(right[i])) fail(ErrorCode::ModelFormat, "tree child index out of range");
      if (static_cast<std::size_t>(feature[i]) >= dims) fail(ErrorCode::ModelFormat, "tree feature index out of range");
    }
  }
  return t;
}

json scaler_json(const Standardizer& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }

Standardizer scaler_from(const json& j) {
  return {j.at("mean").get<std::vector<double>>(), j.at("stddev").get<std::vector<double>>()};
}

std::vector<int> labels_json(const std::vector<DefaultLabel>& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (DefaultLabel l : labels) out.push_back(to_int(l));
  return out;
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["kind"] = to_string(model.kind());
  doc["seed"] = model.spec().seed();
  doc["hyperparameters"] = hyperparameters_json(model.spec().params());
  doc["feature_names"] = model.feature_names();
  std::visit(overloaded{
                 [&](const LogisticModel& m) {
                   doc["standardization"] = scaler_json(m.scaler);
                   doc["payload"] = {{"intercept", m.intercept}, {"weights", m.weights}};
                 },
                 [&](const SvmModel& m) {
                   doc["standardization"] = scaler_json(m.scaler);
                   doc["payload"] = {{"kernel", m.kernel == SvmKernel::Linear ? "linear" : "rbf"},
                                     {"gamma", m.gamma},
                                     {"weights", m.weights},
                                     {"support", m.support},
                                     {"coef", m.coef}};
                 },
                 [&](const KnnModel& m) {
                   doc["standardization"] = scaler_json(m.scaler);
                   doc["payload"] = {{"k", m.k}, {"points", m.points}, {"labels", labels_json(m.labels)}};
                 },
                 [&](const TreeModel& m) { doc["payload"] = {{"tree", tree_json(m.tree)}}; },
                 [&](const ForestModel& m) {
                   json trees = json::array();
                   for (const Tree& t : m.trees) trees.push_back(tree_json(t));
                   doc["payload"] = {{"trees", trees}};
                 },
                 [&](const BoostedEnsemble& m) {
                   json trees = json::array();
                   for (const Tree& t : m.trees) trees.push_back(tree_json(t));
                   doc["payload"] = {{"base_score", m.base_score},
                                     {"learning_rate", m.learning_rate},
                                     {"loss_trace", m.loss_trace},
                                     {"trees", trees}};
                 },
             },
             model.payload());
  return doc.dump() + "\n";
}

TrainedModel model_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormat) fail(ErrorCode::ModelFormat, "not a credrisk model document");
    if (doc.at("version").get<int>() != kVersion) fail(ErrorCode::ModelFormat, "unsupported model version");
    const ClassifierKind kind = parse_classifier_kind(doc.at("kind").get<std::string>());
    ClassifierSpec spec(kind, hyperparameters_from(kind, doc.at("hyperparameters")),
                        doc.at("seed").get<std::uint64_t>());
    auto names = doc.at("feature_names").get<std::vector<std::string>>();
    const std::size_t d = names.size();
    const json& p = doc.at("payload");

    auto check_scaler = [&](const Standardizer& s) {
      if (s.mean.size() != d || s.stddev.size() != d) fail(ErrorCode::ModelFormat, "standardization size mismatch");
    };
    ModelPayload payload;
    switch (kind) {
      case ClassifierKind::Logistic: {
        LogisticModel m{scaler_from(doc.at("standardization")), p.at("intercept").get<double>(),
                        p.at("weights").get<std::vector<double>>()};
        check_scaler(m.scaler);
        if (m.weights.size() != d) fail(ErrorCode::ModelFormat, "weight count mismatch");
        payload = std::move(m);
        break;
      }
      case ClassifierKind::Svm: {
        SvmModel m;
        m.scaler = scaler_from(doc.at("standardization"));
        check_scaler(m.scaler);
        m.kernel = p.at("kernel").get<std::string>() == "linear" ? SvmKernel::Linear : SvmKernel::Rbf;
        m.gamma = p.at("gamma").get<double>();
        m.weights = p.at("weights").get<std::vector<double>>();
        m.support = p.at("support").get<std::vector<double>>();
        m.coef = p.at("coef").get<std::vector<double>>();
        const bool linear_ok = m.kernel != SvmKernel::Linear || m.weights.size() == d + 1;
        if (!linear_ok || m.support.size() != m.coef.size() * d) fail(ErrorCode::ModelFormat, "SVM payload size mismatch");
        payload = std::move(m);
        break;
      }
      case ClassifierKind::Knn: {
        KnnModel m;
        m.scaler = scaler_from(doc.at("standardization"));
        check_scaler(m.scaler);
        m.k = p.at("k").get<std::size_t>();
        m.dims = d;
        m.points = p.at("points").get<std::vector<double>>();
        for (int l : p.at("labels").get<std::vector<int>>()) m.labels.push_back(label_from_int(l));
        if (m.points.size() != m.labels.size() * d || m.k < 1 || m.k > m.labels.size()) {
          fail(ErrorCode::ModelFormat, "KNN payload size mismatch");
        }
        payload = std::move(m);
        break;
      }
      case ClassifierKind::DecisionTree: payload = TreeModel{tree_from(p.at("tree"), d)}; break;
      case ClassifierKind::RandomForest: {
        ForestModel m;
        for (const auto& t : p.at("trees")) m.trees.push_back(tree_from(t, d));
        if (m.trees.empty()) fail(ErrorCode::ModelFormat, "forest without trees");
        payload = std::move(m);
        break;
      }
      case ClassifierKind::XgbBoost:
      case ClassifierKind::LgbmBoost: {
        BoostedEnsemble m;
        m.base_score = p.at("base_score").get<double>();
        m.learning_rate = p.at("learning_rate").get<double>();
        m.loss_trace = p.at("loss_trace").get<std::vector<double>>();
        for (const auto& t : p.at("trees")) m.trees.push_back(tree_from(t, d));
        payload = std::move(m);
        break;
      }
    }
    return TrainedModel(std::move(spec), std::move(names), std::move(payload));
  } catch (const json::exception& e) {
    fail(ErrorCode::ModelFormat, std::string("invalid model document: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << model_to_json(model);
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace credrisk
