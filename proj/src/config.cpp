#include "credrisk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"

namespace credrisk {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void config_error(std::size_t line, const std::string& why) {
  fail(ErrorCode::InvalidArgument, "config line " + std::to_string(line) + ": " + why);
}

// Drops a trailing comment that is outside any string literal.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    else if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

std::string parse_scalar(std::string_view v, std::size_t line) {
  v = trim(v);
  if (v.empty()) config_error(line, "missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') config_error(line, "unterminated string");
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

std::vector<std::string> parse_array(std::string_view v, std::size_t line) {
  v = trim(v);
  if (v.size() < 2 || v.back() != ']') config_error(line, "unterminated array");
  v = trim(v.substr(1, v.size() - 2));
  std::vector<std::string> items;
  while (!v.empty()) {
    std::size_t end = 0;
    if (v.front() == '"') {
      end = v.find('"', 1);
      if (end == std::string_view::npos) config_error(line, "unterminated string in array");
      ++end;
    } else {
      end = v.find(',');
      if (end == std::string_view::npos) end = v.size();
    }
    items.push_back(parse_scalar(v.substr(0, end), line));
    v = trim(v.substr(end));
    if (!v.empty()) {
      if (v.front() != ',') config_error(line, "expected ',' between array items");
      v = trim(v.substr(1));
    }
  }
  return items;
}

double number(const std::string& key, const std::string& v) {
  auto d = csv::parse_double(v);
  if (!d) fail(ErrorCode::InvalidArgument, "config key " + key + " expects a number, got '" + v + "'");
  return *d;
}

std::uint64_t count(const std::string& key, const std::string& v) {
  auto i = csv::parse_int(v);
  if (!i || *i < 0) fail(ErrorCode::InvalidArgument, "config key " + key + " expects a non-negative integer");
  return static_cast<std::uint64_t>(*i);
}

bool boolean(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(ErrorCode::InvalidArgument, "config key " + key + " expects true or false");
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text) {
  ConfigDocument doc;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) config_error(line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(line_no, "expected key = value");
    const std::string key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) config_error(line_no, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (doc.contains(full)) config_error(line_no, "duplicate key " + full);
    const std::string_view value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '[') doc.arrays_[full] = parse_array(value, line_no);
    else doc.scalars_[full] = parse_scalar(value, line_no);
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> ConfigDocument::scalar(const std::string& key) const {
  auto it = scalars_.find(key);
  if (it == scalars_.end()) {
    if (arrays_.count(key)) fail(ErrorCode::InvalidArgument, "config key " + key + " expects a single value");
    return std::nullopt;
  }
  return it->second;
}

std::optional<std::vector<std::string>> ConfigDocument::array(const std::string& key) const {
  auto it = arrays_.find(key);
  if (it == arrays_.end()) {
    if (scalars_.count(key)) fail(ErrorCode::InvalidArgument, "config key " + key + " expects an array");
    return std::nullopt;
  }
  return it->second;
}

std::vector<std::string> ConfigDocument::keys_under(const std::string& prefix) const {
  std::vector<std::string> out;
  const std::string p = prefix + ".";
  for (const auto& k : all_keys()) {
    if (k.rfind(p, 0) == 0 && k.find('.', p.size()) == std::string::npos) out.push_back(k.substr(p.size()));
  }
  return out;
}

std::vector<std::string> ConfigDocument::all_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : scalars_) out.push_back(k);
  for (const auto& [k, v] : arrays_) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------

PipelineConfig::PipelineConfig() {
  for (ClassifierKind k : kAllClassifierKinds) models.push_back(ClassifierSpec::defaults(k, seed));
  set_seed(seed);
}

void PipelineConfig::set_seed(std::uint64_t value) {
  seed = value;
  split.seed = value;
  smote.seed = mix_seed(value, 1);
  for (auto& m : models) m = m.with_seed(value);
}

ClassifierSpec PipelineConfig::spec_for(ClassifierKind kind) const {
  ClassifierSpec spec = ClassifierSpec::defaults(kind, seed);
  auto it = model_overrides_.find(std::string(to_string(kind)));
  if (it != model_overrides_.end()) {
    for (const auto& [key, value] : it->second) spec = spec.with(key, value);
  }
  return spec;
}

PipelineConfig PipelineConfig::from_document(const ConfigDocument& doc) {
  static const std::set<std::string> known = {
      "seed",          "label_threshold", "drop_columns", "threshold", "output_dir", "split.train_fraction",
      "split.stratified", "split.seed",   "smote.k",      "smote.ratio", "smote.seed", "models.kinds",
  };
  PipelineConfig cfg;
  for (const auto& key : doc.all_keys()) {
    if (known.count(key)) continue;
    // [models.<kind>] sections carry hyperparameter overrides.
    if (key.rfind("models.", 0) == 0) {
      const auto rest = key.substr(7);
      const auto dot = rest.find('.');
      if (dot != std::string::npos) {
        const std::string kind(rest.substr(0, dot));
        parse_classifier_kind(kind);
        const auto value = doc.scalar(key);
        cfg.model_overrides_[kind].emplace_back(rest.substr(dot + 1), *value);
        continue;
      }
    }
    fail(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  }

  if (auto v = doc.scalar("seed")) cfg.set_seed(count("seed", *v));
  if (auto v = doc.scalar("label_threshold")) {
    cfg.label_threshold = parse_status(*v);
    if (!is_overdue(cfg.label_threshold)) {
      fail(ErrorCode::InvalidArgument, "label_threshold must be one of the overdue codes 0-5");
    }
  }
  if (auto v = doc.array("drop_columns")) cfg.drop_columns = *v;
  if (auto v = doc.scalar("threshold")) cfg.threshold = number("threshold", *v);
  if (auto v = doc.scalar("output_dir")) cfg.output_dir = *v;
  if (auto v = doc.scalar("split.train_fraction")) cfg.split.train_fraction = number("split.train_fraction", *v);
  if (auto v = doc.scalar("split.stratified")) cfg.split.stratified = boolean("split.stratified", *v);
  if (auto v = doc.scalar("split.seed")) cfg.split.seed = count("split.seed", *v);
  if (auto v = doc.scalar("smote.k")) cfg.smote.k_neighbors = count("smote.k", *v);
  if (auto v = doc.scalar("smote.ratio")) cfg.smote.target_ratio = number("smote.ratio", *v);
  if (auto v = doc.scalar("smote.seed")) cfg.smote.seed = count("smote.seed", *v);

  std::vector<ClassifierKind> kinds(kAllClassifierKinds.begin(), kAllClassifierKinds.end());
  if (auto v = doc.array("models.kinds")) {
    kinds.clear();
    for (const auto& name : *v) kinds.push_back(parse_classifier_kind(name));
  }
  for (const auto& [kind, overrides] : cfg.model_overrides_) {
    (void)overrides;
    parse_classifier_kind(kind);
  }
  cfg.models.clear();
  for (ClassifierKind k : kinds) cfg.models.push_back(cfg.spec_for(k));
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  return from_document(ConfigDocument::load(path));
}

void PipelineConfig::validate() const {
  split.validate();
  smote.validate();
  if (!(threshold >= 0.0 && threshold <= 1.0)) fail(ErrorCode::InvalidArgument, "threshold must lie in [0, 1]");
  if (models.empty()) fail(ErrorCode::InvalidArgument, "no models configured");
}

}  // namespace credrisk
