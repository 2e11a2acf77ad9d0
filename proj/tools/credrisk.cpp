// credrisk: batch pipeline for credit-default classification.
//
//   credrisk generate --rows 5000 --default-rate 0.1 --out-dir data
//   credrisk prepare  --application data/application.csv --credit data/credit.csv
//   credrisk train    --dataset out/dataset.csv --model lgbm_boost --param num_leaves=15
//   credrisk evaluate --model-file out/lgbm_boost.model.json --dataset out/holdout.csv
//   credrisk compare  --dataset out/dataset.csv

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credrisk/config.hpp"
#include "credrisk/error.hpp"
#include "credrisk/pipeline.hpp"

namespace {

using namespace credrisk;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidHyperparameters:
    case ErrorCode::MissingColumn:
    case ErrorCode::MalformedRow:
    case ErrorCode::DuplicateHeader:
    case ErrorCode::UnknownStatus:
    case ErrorCode::ColumnMismatch:
    case ErrorCode::UnknownColumn:
    case ErrorCode::ModelFormat:
      return kExitUsage;
    case ErrorCode::NoOverlap:
    case ErrorCode::DegenerateClass:
    case ErrorCode::TooFewMinority:
    case ErrorCode::SingleClassTrainingSet:
    case ErrorCode::UnseenCategory:
    case ErrorCode::EmptyHistory:
    case ErrorCode::EmptyInput:
    case ErrorCode::SingleClassInput:
    case ErrorCode::Io:
      return kExitData;
    default:
      return kExitInternal;
  }
}

// Flags shared by the pipeline subcommands. Unset options leave the config
// value alone.
struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> train_fraction;
  std::optional<double> threshold;
  std::optional<std::size_t> smote_k;
  std::optional<double> smote_ratio;
  std::optional<std::string> label_threshold;
  std::optional<std::string> out_dir;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Config file (TOML subset)")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Global seed");
    app->add_option("--train-fraction", train_fraction, "Fraction of rows used for training");
    app->add_option("--threshold", threshold, "Classification cutoff on scores");
    app->add_option("--smote-k", smote_k, "SMOTE neighbour count");
    app->add_option("--smote-ratio", smote_ratio, "Minority/majority ratio after SMOTE");
    app->add_option("--label-threshold", label_threshold, "Minimum overdue status counted as default");
    app->add_option("--out-dir", out_dir, "Output directory");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig() : PipelineConfig::from_file(config_path);
    if (seed) cfg.set_seed(*seed);
    if (train_fraction) cfg.split.train_fraction = *train_fraction;
    if (threshold) cfg.threshold = *threshold;
    if (smote_k) cfg.smote.k_neighbors = *smote_k;
    if (smote_ratio) cfg.smote.target_ratio = *smote_ratio;
    if (label_threshold) {
      cfg.label_threshold = parse_status(*label_threshold);
      if (!is_overdue(cfg.label_threshold)) {
        fail(ErrorCode::InvalidArgument, "--label-threshold must be one of the overdue codes 0-5");
      }
    }
    if (out_dir) cfg.output_dir = *out_dir;
    cfg.validate();
    return cfg;
  }
};

std::string percent(std::size_t part, std::size_t whole) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole));
  return buf;
}

void print_evaluation(const Evaluation& e) {
  const auto& c = e.confusion;
  std::printf("  accuracy  %.7f\n", e.report.accuracy);
  if (e.auc) {
    std::printf("  auc       %.7f\n", *e.auc);
  } else {
    std::printf("  auc       unavailable (single class)\n");
  }
  for (int label = 0; label < 2; ++label) {
    const auto& m = e.report.per_class[label];
    std::printf("  class %d   precision %.4f  recall %.4f  f1 %.4f  support %zu\n", label, m.precision, m.recall,
                m.f1, m.support);
  }
  std::printf("  confusion tp=%zu fp=%zu fn=%zu tn=%zu\n", c.tp, c.fp, c.fn, c.tn);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Credit-default classification pipeline"};
  app.require_subcommand(1);

  std::size_t gen_rows = 5000;
  double gen_rate = 0.1;
  std::uint64_t gen_seed = 42;
  std::string gen_dir = "data";
  auto* generate = app.add_subcommand("generate", "Write a synthetic application/credit CSV pair");
  generate->add_option("--rows", gen_rows, "Number of customers");
  generate->add_option("--default-rate", gen_rate, "Share of defaulting customers");
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--out-dir", gen_dir, "Output directory");

  CommonFlags prep_flags;
  std::string prep_app, prep_credit;
  auto* prepare = app.add_subcommand("prepare", "Merge, label and encode the two tables");
  prepare->add_option("--application", prep_app, "application.csv")->required();
  prepare->add_option("--credit", prep_credit, "credit.csv")->required();
  prep_flags.attach(prepare);

  CommonFlags train_flags;
  std::string train_dataset, train_model;
  std::vector<std::string> train_params;
  auto* train = app.add_subcommand("train", "Fit one model on a balanced split and report holdout metrics");
  train->add_option("--dataset", train_dataset, "Prepared dataset CSV")->required();
  train->add_option("--model", train_model, "Model kind")->required();
  train->add_option("--param", train_params, "Hyperparameter override key=value (repeatable)");
  train_flags.attach(train);

  CommonFlags eval_flags;
  std::string eval_model, eval_dataset;
  auto* evaluate = app.add_subcommand("evaluate", "Score a dataset with a saved model");
  evaluate->add_option("--model-file", eval_model, "Saved model JSON")->required();
  evaluate->add_option("--dataset", eval_dataset, "Dataset CSV")->required();
  eval_flags.attach(evaluate);

  CommonFlags cmp_flags;
  std::string cmp_dataset;
  std::vector<std::string> cmp_models;
  auto* compare = app.add_subcommand("compare", "Train every configured model on one shared split");
  compare->add_option("--dataset", cmp_dataset, "Prepared dataset CSV")->required();
  compare->add_option("--models", cmp_models, "Subset of model kinds (default: config or all seven)");
  cmp_flags.attach(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) {
      cmd_generate(gen_rows, gen_rate, gen_seed, gen_dir);
      std::cout << "wrote " << (fs::path(gen_dir) / kApplicationFile).string() << " and "
                << (fs::path(gen_dir) / kCreditFile).string() << '\n';
    } else if (*prepare) {
      const auto cfg = prep_flags.resolve();
      const auto s = cmd_prepare(prep_app, prep_credit, cfg);
      std::cout << "rows      " << s.rows << '\n'
                << "features  " << s.features << '\n'
                << "defaults  " << s.defaults << " (" << percent(s.defaults, s.rows) << ")\n"
                << "good      " << s.rows - s.defaults << " (" << percent(s.rows - s.defaults, s.rows) << ")\n"
                << "dataset   " << s.dataset_path.string() << '\n'
                << "encoder   " << s.encoder_path.string() << '\n';
    } else if (*train) {
      const auto cfg = train_flags.resolve();
      ClassifierSpec spec = cfg.spec_for(parse_classifier_kind(train_model));
      for (const auto& kv : train_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, "--param expects key=value, got '" + kv + "'");
        spec = spec.with(kv.substr(0, eq), kv.substr(eq + 1));
      }
      const auto s = cmd_train(train_dataset, spec, cfg);
      std::cout << "model " << train_model << " holdout\n";
      print_evaluation(s.holdout);
      std::cout << "model   " << s.model_path.string() << '\n'
                << "report  " << s.report_path.string() << '\n'
                << "holdout " << s.holdout_path.string() << '\n';
    } else if (*evaluate) {
      const auto cfg = eval_flags.resolve();
      const auto s = cmd_evaluate(eval_model, eval_dataset, cfg);
      print_evaluation(s.evaluation);
      std::cout << "report  " << s.report_path.string() << '\n';
      if (s.evaluation.roc) std::cout << "roc     " << s.roc_path.string() << '\n';
    } else if (*compare) {
      auto cfg = cmp_flags.resolve();
      if (!cmp_models.empty()) {
        cfg.models.clear();
        for (const auto& name : cmp_models) cfg.models.push_back(cfg.spec_for(parse_classifier_kind(name)));
      }
      const auto board = cmd_compare(cmp_dataset, cfg, &std::cerr);
      std::cout << "split " << board.split_hash << '\n';
      board.write_table(std::cout);
      if (board.succeeded() == 0) {
        std::cerr << "error: every model failed\n";
        return kExitData;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
