#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "credrisk/models.hpp"
#include "credrisk/sampling.hpp"
#include "credrisk/schema.hpp"

namespace credrisk {

// Flat view of a small TOML subset: `[section]` / `[a.b]` headers,
// `key = value` lines with strings, numbers, booleans and arrays of those,
// and `#` comments. Keys are stored by full dotted path.
class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text);
  static ConfigDocument load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return scalars_.count(key) || arrays_.count(key); }
  std::optional<std::string> scalar(const std::string& key) const;
  std::optional<std::vector<std::string>> array(const std::string& key) const;
  // Keys directly under `prefix.` (no further dots).
  std::vector<std::string> keys_under(const std::string& prefix) const;
  std::vector<std::string> all_keys() const;

 private:
  std::map<std::string, std::string> scalars_;
  std::map<std::string, std::vector<std::string>> arrays_;
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  StatusCode label_threshold = StatusCode::DPD60;
  std::vector<std::string> drop_columns = kDefaultDropColumns;
  SplitConfig split;
  SmoteConfig smote;
  std::vector<ClassifierSpec> models;  // defaults to all seven kinds
  double threshold = 0.5;
  std::filesystem::path output_dir = "out";

  PipelineConfig();

  // Unknown keys are rejected so typos do not silently fall back to
  // defaults.
  static PipelineConfig from_document(const ConfigDocument& doc);
  static PipelineConfig from_file(const std::filesystem::path& path);

  void set_seed(std::uint64_t value);
  // Spec for `kind` with any [models.<kind>] overrides from the config.
  ClassifierSpec spec_for(ClassifierKind kind) const;
  void validate() const;

 private:
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> model_overrides_;
};

}  // namespace credrisk
