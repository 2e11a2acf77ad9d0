#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "credrisk/config.hpp"
#include "credrisk/error.hpp"
#include "credrisk/pipeline.hpp"

using namespace credrisk;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("credrisk_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config document parsing") {
  const auto doc = ConfigDocument::parse(
      "seed = 7  # global\n"
      "drop_columns = [\"FLAG_MOBIL\", \"FLAG_EMAIL\"]\n"
      "[split]\ntrain_fraction = 0.8\n"
      "[models.lgbm_boost]\nnum_leaves = 15\n");
  CHECK(doc.scalar("seed") == "7");
  CHECK(doc.array("drop_columns")->size() == 2);
  CHECK(doc.scalar("split.train_fraction") == "0.8");
  CHECK(doc.keys_under("models.lgbm_boost") == std::vector<std::string>{"num_leaves"});
  CHECK_THROWS_AS(ConfigDocument::parse("seed 7\n"), Error);
}

TEST_CASE("pipeline config from document") {
  const auto cfg = PipelineConfig::from_document(ConfigDocument::parse(
      "seed = 7\nthreshold = 0.4\nlabel_threshold = \"3\"\n"
      "[smote]\nk = 3\n[models]\nkinds = [\"logistic\", \"lgbm_boost\"]\n"
      "[models.lgbm_boost]\nnum_leaves = 15\n"));
  CHECK(cfg.seed == 7);
  CHECK(cfg.split.seed == 7);
  CHECK(cfg.threshold == 0.4);
  CHECK(cfg.label_threshold == StatusCode::DPD90);
  CHECK(cfg.smote.k_neighbors == 3);
  REQUIRE(cfg.models.size() == 2);
  CHECK(cfg.models[1].kind() == ClassifierKind::LgbmBoost);
  CHECK(std::get<BoostParams>(cfg.models[1].params()).num_leaves == 15);
  CHECK(cfg.models[1].seed() == 7);

  CHECK_THROWS_AS(PipelineConfig::from_document(ConfigDocument::parse("sed = 1\n")), Error);
  CHECK_THROWS_AS(PipelineConfig::from_document(ConfigDocument::parse("label_threshold = \"C\"\n")), Error);
  CHECK_THROWS_AS(PipelineConfig::from_document(ConfigDocument::parse("[models.lgbm_boost]\nnum_leaves = 99\n")), Error);
  CHECK(PipelineConfig().models.size() == 7);
}

TEST_CASE("split hash depends on the partition") {
  const std::vector<std::size_t> a{0, 2};
  const std::vector<std::size_t> b{1, 3};
  CHECK(hash_split(a, b) == hash_split(a, b));
  CHECK(hash_split(a, b) != hash_split(b, a));
  CHECK(hash_split(a, b).size() == 16);
}

TEST_CASE("evaluation of a single class slice omits auc") {
  const std::vector<DefaultLabel> y(3, DefaultLabel::Good);
  const std::vector<double> s{0.1, 0.7, 0.2};
  const auto e = evaluate_scores(y, s, 0.5);
  CHECK_FALSE(e.auc.has_value());
  CHECK(e.report.accuracy == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("generate prepare train evaluate compare") {
  TempDir tmp("pipeline");
  cmd_generate(600, 0.15, 3, tmp.path / "data");
  CHECK(fs::exists(tmp.path / "data" / kApplicationFile));

  PipelineConfig cfg;
  cfg.output_dir = tmp.path / "out";
  const auto prep = cmd_prepare(tmp.path / "data" / kApplicationFile, tmp.path / "data" / kCreditFile, cfg);
  CHECK(prep.rows == 600);
  CHECK(prep.features == 14);
  CHECK(prep.defaults == 90);

  const auto spec = cfg.spec_for(ClassifierKind::LgbmBoost);
  const auto trained = cmd_train(prep.dataset_path, spec, cfg);
  const std::string first_report = slurp(trained.report_path);
  const auto report = nlohmann::json::parse(first_report);
  CHECK(report["holdout"]["auc"].get<double>() >= 0.0);
  CHECK(report["holdout"]["auc"].get<double>() <= 1.0);
  CHECK(cmd_train(prep.dataset_path, spec, cfg).holdout.report.accuracy == trained.holdout.report.accuracy);
  CHECK(slurp(trained.report_path) == first_report);

  const auto evaluated = cmd_evaluate(trained.model_path, trained.holdout_path, cfg);
  CHECK(evaluated.evaluation.report.accuracy == trained.holdout.report.accuracy);
  CHECK(evaluated.evaluation.auc == trained.holdout.auc);
  CHECK(slurp(evaluated.roc_path).rfind("fpr,tpr\n", 0) == 0);
  const auto eval_doc = nlohmann::json::parse(slurp(evaluated.report_path));
  CHECK(eval_doc["evaluation"] == report["holdout"]);

  cfg.models = {cfg.spec_for(ClassifierKind::Logistic), cfg.spec_for(ClassifierKind::XgbBoost),
                cfg.spec_for(ClassifierKind::Knn).with("k", "5000")};
  const auto board = cmd_compare(prep.dataset_path, cfg);
  REQUIRE(board.rows.size() == 3);
  CHECK(board.succeeded() == 2);
  CHECK(board.rows[0].accuracy >= board.rows[1].accuracy);
  CHECK_FALSE(board.rows[2].ok);
  CHECK(board.rows[2].model == "knn");
  const std::string csv = slurp(cfg.output_dir / kScoreboardFile);
  CHECK(csv.rfind("model,accuracy,auc,precision,recall,f1\n", 0) == 0);
  CHECK(csv.find("knn,,,,,\n") != std::string::npos);
  CHECK(fs::exists(cfg.output_dir / "roc_logistic.csv"));
  const auto cmp = nlohmann::json::parse(slurp(cfg.output_dir / kCompareReportFile));
  CHECK(cmp["split_hash"] == board.split_hash);
}

TEST_CASE("prepare reports schema problems") {
  TempDir tmp("schema");
  std::ofstream(tmp.path / "a.csv") << "ID,CODE_GENDER\n1,F\n";
  std::ofstream(tmp.path / "c.csv") << "ID,MONTHS_BALANCE,STATUS\n1,0,C\n";
  PipelineConfig cfg;
  cfg.output_dir = tmp.path / "out";
  try {
    cmd_prepare(tmp.path / "a.csv", tmp.path / "c.csv", cfg);
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingColumn);
  }
  try {
    cmd_prepare(tmp.path / "missing.csv", tmp.path / "c.csv", cfg);
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}
