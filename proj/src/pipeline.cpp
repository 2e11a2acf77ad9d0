#include "credrisk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"
#include "credrisk/model_io.hpp"

namespace credrisk {

namespace {

using json = nlohmann::ordered_json;

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  return in;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << contents;
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory " + dir.string() + ": " + ec.message());
}

json class_json(int label, const ClassMetrics& m) {
  return {{"label", label}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

json evaluation_json(const Evaluation& e, double threshold) {
  json j;
  j["rows"] = e.report.total;
  j["threshold"] = threshold;
  j["confusion"] = {{"tp", e.confusion.tp}, {"fp", e.confusion.fp}, {"fn", e.confusion.fn}, {"tn", e.confusion.tn}};
  j["accuracy"] = e.report.accuracy;
  j["auc"] = e.auc ? json(*e.auc) : json(nullptr);
  j["classes"] = json::array({class_json(0, e.report.per_class[0]), class_json(1, e.report.per_class[1])});
  return j;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string roc_csv(const RocCurve& curve) {
  std::ostringstream out;
  write_roc_csv(out, curve);
  return out.str();
}

}  // namespace

Evaluation evaluate_scores(std::span<const DefaultLabel> y_true, std::span<const double> scores, double threshold) {
  const auto predicted = threshold_scores(scores, threshold);
  Evaluation e;
  e.confusion = confusion(y_true, predicted);
  e.report = classification_report(y_true, predicted);
  const bool both = e.confusion.tp + e.confusion.fn > 0 && e.confusion.fp + e.confusion.tn > 0;
  if (both) {
    e.roc = roc_curve(y_true, scores);
    e.auc = auc(*e.roc);
  }
  return e;
}

std::string hash_split(std::span<const std::size_t> train, std::span<const std::size_t> test) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t i : train) feed(i);
  feed(~std::uint64_t{0});
  for (std::size_t i : test) feed(i);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TrainingSplit make_training_split(const LabeledDataset& data, const PipelineConfig& cfg) {
  auto split = stratified_split(data, cfg.split);
  TrainingSplit out;
  out.split_hash = hash_split(split.train_indices, split.test_indices);
  const std::size_t before = split.train.size();
  out.train = smote(split.train, cfg.smote);
  out.synthetic_rows = out.train.size() - before;
  out.test = std::move(split.test);
  out.train_indices = std::move(split.train_indices);
  out.test_indices = std::move(split.test_indices);
  if (std::find(out.test.synthetic.begin(), out.test.synthetic.end(), true) != out.test.synthetic.end()) {
    fail(ErrorCode::Internal, "synthetic rows leaked into the test set");
  }
  return out;
}

LabeledDataset load_dataset(const fs::path& path) {
  auto in = open_in(path);
  return read_dataset_csv(in);
}

// ---------------------------------------------------------------------------
// Scoreboard

std::size_t Scoreboard::succeeded() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.ok; }));
}

void Scoreboard::write_csv(std::ostream& out) const {
  out << "model,accuracy,auc,precision,recall,f1\n";
  for (const auto& r : rows) {
    out << r.model << ',';
    if (r.ok) {
      out << csv::format_double(r.accuracy) << ',' << (r.auc ? csv::format_double(*r.auc) : "") << ','
          << csv::format_double(r.precision) << ',' << csv::format_double(r.recall) << ','
          << csv::format_double(r.f1);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

void Scoreboard::write_table(std::ostream& out) const {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.model.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  out << pad("model", width) << "  accuracy   auc        precision  recall     f1\n";
  out << std::string(width, '-') << "  ---------  ---------  ---------  ---------  ---------\n";
  for (const auto& r : rows) {
    out << pad(r.model, width) << "  ";
    if (!r.ok) {
      out << "FAILED: " << r.error << '\n';
      continue;
    }
    out << pad(fixed(r.accuracy, 7), 9) << "  " << pad(r.auc ? fixed(*r.auc, 7) : "n/a", 9) << "  "
        << pad(fixed(r.precision, 7), 9) << "  " << pad(fixed(r.recall, 7), 9) << "  " << fixed(r.f1, 7) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Commands

void cmd_generate(std::size_t n_customers, double default_rate, std::uint64_t seed, const fs::path& out_dir) {
  const auto tables = generate_synthetic(n_customers, default_rate, seed);
  ensure_dir(out_dir);
  write_file(out_dir / kApplicationFile, tables.applications_csv);
  write_file(out_dir / kCreditFile, tables.credit_csv);
}

PrepareSummary cmd_prepare(const fs::path& application_csv, const fs::path& credit_csv, const PipelineConfig& cfg) {
  auto app_in = open_in(application_csv);
  const auto apps = parse_applications(app_in);
  auto credit_in = open_in(credit_csv);
  const auto credit = parse_credit(credit_in);

  const RawTable table = merge_and_label(apps, credit, cfg.drop_columns, cfg.label_threshold);
  std::vector<std::string> categorical;
  for (const auto& c : table.columns) {
    if (c.categorical) categorical.push_back(c.name);
  }
  const EncodingMap map = fit_encoder(table, categorical);
  LabeledDataset data(encode(table, map), table.labels);
  if (!data.has_both_classes()) {
    fail(ErrorCode::DegenerateClass, "prepared dataset holds a single class; cannot train a classifier");
  }

  ensure_dir(cfg.output_dir);
  PrepareSummary s;
  s.dataset_path = cfg.output_dir / kDatasetFile;
  s.encoder_path = cfg.output_dir / kEncoderFile;
  std::ostringstream ds;
  write_dataset_csv(ds, data);
  write_file(s.dataset_path, ds.str());
  write_file(s.encoder_path, map.to_json());
  s.rows = data.size();
  s.features = data.features.cols();
  s.defaults = data.count(DefaultLabel::Default);
  return s;
}

TrainSummary cmd_train(const fs::path& dataset, const ClassifierSpec& spec, const PipelineConfig& cfg) {
  const LabeledDataset data = load_dataset(dataset);
  const TrainingSplit split = make_training_split(data, cfg);
  const TrainedModel model = fit(spec, split.train);
  const auto scores = score(model, split.test.features);

  TrainSummary s;
  s.holdout = evaluate_scores(split.test.labels, scores, cfg.threshold);
  ensure_dir(cfg.output_dir);
  const std::string kind(to_string(spec.kind()));
  s.model_path = cfg.output_dir / (kind + ".model.json");
  s.report_path = cfg.output_dir / (kind + ".report.json");
  s.holdout_path = cfg.output_dir / kHoldoutFile;
  save_model(model, s.model_path);

  json report;
  report["model"] = kind;
  report["seed"] = spec.seed();
  report["training"] = {{"rows", split.train.size()},
                        {"synthetic_rows", split.synthetic_rows},
                        {"defaults", split.train.count(DefaultLabel::Default)},
                        {"split_hash", split.split_hash}};
  report["holdout"] = evaluation_json(s.holdout, cfg.threshold);
  write_file(s.report_path, report.dump(2) + "\n");

  std::ostringstream holdout;
  write_dataset_csv(holdout, split.test);
  write_file(s.holdout_path, holdout.str());
  return s;
}

EvaluateSummary cmd_evaluate(const fs::path& model_file, const fs::path& dataset, const PipelineConfig& cfg) {
  const TrainedModel model = load_model(model_file);
  const LabeledDataset data = load_dataset(dataset);
  const auto scores = score(model, data.features);

  EvaluateSummary s;
  s.evaluation = evaluate_scores(data.labels, scores, cfg.threshold);
  ensure_dir(cfg.output_dir);
  s.report_path = cfg.output_dir / "evaluation.json";
  s.roc_path = cfg.output_dir / "roc.csv";
  json report;
  report["model"] = to_string(model.kind());
  report["evaluation"] = evaluation_json(s.evaluation, cfg.threshold);
  write_file(s.report_path, report.dump(2) + "\n");
  if (s.evaluation.roc) write_file(s.roc_path, roc_csv(*s.evaluation.roc));
  return s;
}

Scoreboard cmd_compare(const fs::path& dataset, const PipelineConfig& cfg, std::ostream* progress) {
  const LabeledDataset data = load_dataset(dataset);
  const TrainingSplit split = make_training_split(data, cfg);
  ensure_dir(cfg.output_dir);

  Scoreboard board;
  board.split_hash = split.split_hash;
  json report;
  report["split_hash"] = split.split_hash;
  report["train_rows"] = split.train.size();
  report["synthetic_rows"] = split.synthetic_rows;
  report["test_rows"] = split.test.size();
  report["models"] = json::array();

  for (const ClassifierSpec& spec : cfg.models) {
    ScoreboardRow row;
    row.model = std::string(to_string(spec.kind()));
    json entry;
    entry["model"] = row.model;
    entry["split_hash"] = split.split_hash;
    const auto start = std::chrono::steady_clock::now();
    try {
      const TrainedModel model = fit(spec, split.train);
      const auto scores = score(model, split.test.features);
      const Evaluation e = evaluate_scores(split.test.labels, scores, cfg.threshold);
      row.ok = true;
      row.accuracy = e.report.accuracy;
      row.auc = e.auc;
      row.precision = e.report.positive().precision;
      row.recall = e.report.positive().recall;
      row.f1 = e.report.positive().f1;
      entry["status"] = "ok";
      entry["evaluation"] = evaluation_json(e, cfg.threshold);
      if (e.roc) write_file(cfg.output_dir / ("roc_" + row.model + ".csv"), roc_csv(*e.roc));
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
      entry["status"] = "failed";
      entry["error"] = row.error;
    }
    if (progress != nullptr) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      *progress << "  " << row.model << (row.ok ? " done" : " FAILED") << " in " << fixed(secs, 2) << " s\n";
    }
    report["models"].push_back(std::move(entry));
    board.rows.push_back(std::move(row));
  }

  std::stable_sort(board.rows.begin(), board.rows.end(), [](const ScoreboardRow& a, const ScoreboardRow& b) {
    if (a.ok != b.ok) return a.ok;
    return a.ok && a.accuracy > b.accuracy;
  });

  std::ostringstream csv_out;
  board.write_csv(csv_out);
  write_file(cfg.output_dir / kScoreboardFile, csv_out.str());
  write_file(cfg.output_dir / kCompareReportFile, report.dump(2) + "\n");
  return board;
}

}  // namespace credrisk
