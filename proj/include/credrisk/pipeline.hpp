#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "credrisk/config.hpp"
#include "credrisk/ingest.hpp"
#include "credrisk/metrics.hpp"
#include "credrisk/models.hpp"
#include "credrisk/sampling.hpp"

namespace credrisk {

namespace fs = std::filesystem;

// Output file names inside the output directory.
inline constexpr const char* kApplicationFile = "application.csv";
inline constexpr const char* kCreditFile = "credit.csv";
inline constexpr const char* kDatasetFile = "dataset.csv";
inline constexpr const char* kEncoderFile = "encoder.json";
inline constexpr const char* kHoldoutFile = "holdout.csv";
inline constexpr const char* kScoreboardFile = "scoreboard.csv";
inline constexpr const char* kCompareReportFile = "compare_report.json";

struct Evaluation {
  ConfusionMatrix confusion;
  ClassificationReport report;
  std::optional<double> auc;  // absent when the slice holds one class
  std::optional<RocCurve> roc;
};

Evaluation evaluate_scores(std::span<const DefaultLabel> y_true, std::span<const double> scores, double threshold);

// Split, then oversample the training part only.
struct TrainingSplit {
  LabeledDataset train;  // balanced
  LabeledDataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::string split_hash;
  std::size_t synthetic_rows = 0;
};

TrainingSplit make_training_split(const LabeledDataset& data, const PipelineConfig& cfg);

// FNV-1a over the train then test index lists, as 16 hex digits.
std::string hash_split(std::span<const std::size_t> train, std::span<const std::size_t> test);

struct ScoreboardRow {
  std::string model;
  bool ok = false;
  double accuracy = 0.0;
  std::optional<double> auc;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::string error;
};

// Rows sorted by accuracy, highest first; failed rows last.
struct Scoreboard {
  std::vector<ScoreboardRow> rows;
  std::string split_hash;

  void write_csv(std::ostream& out) const;
  void write_table(std::ostream& out) const;
  std::size_t succeeded() const;
};

struct PrepareSummary {
  std::size_t rows = 0;
  std::size_t features = 0;
  std::size_t defaults = 0;
  fs::path dataset_path;
  fs::path encoder_path;
};

struct TrainSummary {
  fs::path model_path;
  fs::path report_path;
  fs::path holdout_path;
  Evaluation holdout;
};

struct EvaluateSummary {
  fs::path report_path;
  fs::path roc_path;
  Evaluation evaluation;
};

void cmd_generate(std::size_t n_customers, double default_rate, std::uint64_t seed, const fs::path& out_dir);
PrepareSummary cmd_prepare(const fs::path& application_csv, const fs::path& credit_csv, const PipelineConfig& cfg);
TrainSummary cmd_train(const fs::path& dataset, const ClassifierSpec& spec, const PipelineConfig& cfg);
EvaluateSummary cmd_evaluate(const fs::path& model_file, const fs::path& dataset, const PipelineConfig& cfg);
Scoreboard cmd_compare(const fs::path& dataset, const PipelineConfig& cfg, std::ostream* progress = nullptr);

LabeledDataset load_dataset(const fs::path& path);

}  // namespace credrisk
