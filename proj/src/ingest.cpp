#include "credrisk/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"
#include "credrisk/random.hpp"

namespace credrisk {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string row_label(std::size_t record) { return "row " + std::to_string(record); }

// Maps required column names (upper-case) to their position in the header.
template <std::size_t N>
std::array<std::size_t, N> resolve_header(const std::vector<std::string>& header,
                                          const std::array<std::string_view, N>& required) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto [it, inserted] = position.emplace(upper(header[i]), i);
    if (!inserted) fail(ErrorCode::DuplicateHeader, "header repeats column '" + header[i] + "'");
  }
  std::array<std::size_t, N> out{};
  for (std::size_t k = 0; k < N; ++k) {
    auto it = position.find(std::string(required[k]));
    if (it == position.end()) {
      fail(ErrorCode::MissingColumn, "required column '" + std::string(required[k]) + "' is missing");
    }
    out[k] = it->second;
  }
  return out;
}

[[noreturn]] void malformed(std::size_t record, std::string_view column, const std::string& why) {
  fail(ErrorCode::MalformedRow, row_label(record) + ", column " + std::string(column) + ": " + why);
}

std::int64_t int_field(const std::vector<std::string>& row, std::size_t pos, std::size_t record,
                       std::string_view column) {
  auto v = csv::parse_int(row[pos]);
  if (!v) malformed(record, column, "expected an integer, got '" + row[pos] + "'");
  return *v;
}

double real_field(const std::vector<std::string>& row, std::size_t pos, std::size_t record,
                  std::string_view column) {
  auto v = csv::parse_double(row[pos]);
  if (!v) malformed(record, column, "expected a number, got '" + row[pos] + "'");
  return *v;
}

}  // namespace

// ---------------------------------------------------------------------------
// FeatureMatrix / LabeledDataset

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names, std::vector<double> values)
    : names_(std::move(column_names)), values_(std::move(values)) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) fail(ErrorCode::InvalidArgument, "duplicate feature column '" + n + "'");
  }
  if (names_.empty()) {
    if (!values_.empty()) fail(ErrorCode::InvalidArgument, "values given for a matrix without columns");
    rows_ = 0;
    return;
  }
  if (values_.size() % names_.size() != 0) {
    fail(ErrorCode::InvalidArgument, "value count is not a multiple of the column count");
  }
  rows_ = values_.size() / names_.size();
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "feature matrix contains a non-finite value");
  }
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return j;
  }
  return std::nullopt;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * cols());
  for (std::size_t i : indices) {
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return FeatureMatrix(names_, std::move(out));
}

LabeledDataset::LabeledDataset(FeatureMatrix x, std::vector<DefaultLabel> y)
    : LabeledDataset(std::move(x), std::move(y), {}) {}

LabeledDataset::LabeledDataset(FeatureMatrix x, std::vector<DefaultLabel> y,
                               std::vector<bool> synthetic_flags)
    : features(std::move(x)), labels(std::move(y)), synthetic(std::move(synthetic_flags)) {
  if (synthetic.empty()) synthetic.assign(labels.size(), false);
  if (labels.size() != features.rows() || synthetic.size() != labels.size()) {
    fail(ErrorCode::LengthMismatch, "label count does not match feature rows");
  }
}

std::size_t LabeledDataset::count(DefaultLabel label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<DefaultLabel> y;
  std::vector<bool> s;
  y.reserve(indices.size());
  s.reserve(indices.size());
  for (std::size_t i : indices) {
    y.push_back(labels[i]);
    s.push_back(synthetic[i]);
  }
  return LabeledDataset(features.select_rows(indices), std::move(y), std::move(s));
}

// ---------------------------------------------------------------------------
// Raw tables and encodings

const RawColumn* RawTable::find(std::string_view name) const {
  const std::string key = upper(name);
  for (const auto& c : columns) {
    if (upper(c.name) == key) return &c;
  }
  return nullptr;
}

std::optional<std::size_t> ColumnEncoding::code_of(std::string_view value) const {
  auto it = std::lower_bound(categories.begin(), categories.end(), value);
  if (it == categories.end() || *it != value) return std::nullopt;
  return static_cast<std::size_t>(it - categories.begin());
}

const ColumnEncoding* EncodingMap::find(std::string_view column) const {
  const std::string key = upper(column);
  for (const auto& c : columns) {
    if (upper(c.column) == key) return &c;
  }
  return nullptr;
}

std::string EncodingMap::to_json() const {
  nlohmann::ordered_json doc;
  doc["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : columns) {
    doc["columns"].push_back({{"column", c.column}, {"categories", c.categories}});
  }
  return doc.dump(2) + "\n";
}

EncodingMap EncodingMap::from_json(std::string_view text) {
  EncodingMap map;
  try {
    auto doc = nlohmann::json::parse(text);
    for (const auto& c : doc.at("columns")) {
      ColumnEncoding enc{c.at("column").get<std::string>(), c.at("categories").get<std::vector<std::string>>()};
      if (!std::is_sorted(enc.categories.begin(), enc.categories.end()) ||
          std::adjacent_find(enc.categories.begin(), enc.categories.end()) != enc.categories.end()) {
        fail(ErrorCode::ModelFormat, "encoder categories for '" + enc.column + "' are not strictly ascending");
      }
      map.columns.push_back(std::move(enc));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ModelFormat, std::string("invalid encoder document: ") + e.what());
  }
  return map;
}

// ---------------------------------------------------------------------------
// Parsing

std::vector<ApplicationRecord> parse_applications(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) fail(ErrorCode::MissingColumn, "application file is empty (no header row)");
  const auto pos = resolve_header(*header, kApplicationColumns);

  std::vector<ApplicationRecord> out;
  std::unordered_set<std::int64_t> seen;
  while (auto row = reader.next()) {
    const std::size_t rec = reader.record_number();
    if (row->size() != header->size()) {
      fail(ErrorCode::MalformedRow, row_label(rec) + ": expected " + std::to_string(header->size()) +
                                        " fields, found " + std::to_string(row->size()));
    }
    const auto& f = *row;
    auto col = [&](std::size_t k) { return kApplicationColumns[k]; };
    ApplicationRecord r;
    r.id = int_field(f, pos[0], rec, col(0));
    r.code_gender = f[pos[1]];
    r.flag_own_car = f[pos[2]];
    r.flag_own_realty = f[pos[3]];
    r.cnt_children = int_field(f, pos[4], rec, col(4));
    r.amt_income_total = real_field(f, pos[5], rec, col(5));
    r.name_income_type = f[pos[6]];
    r.name_education_type = f[pos[7]];
    r.name_family_status = f[pos[8]];
    r.name_housing_type = f[pos[9]];
    r.days_birth = int_field(f, pos[10], rec, col(10));
    r.days_employed = int_field(f, pos[11], rec, col(11));
    r.flag_mobil = static_cast<int>(int_field(f, pos[12], rec, col(12)));
    r.flag_work_phone = static_cast<int>(int_field(f, pos[13], rec, col(13)));
    r.flag_phone = static_cast<int>(int_field(f, pos[14], rec, col(14)));
    r.flag_email = static_cast<int>(int_field(f, pos[15], rec, col(15)));
    r.occupation_type = f[pos[16]];
    r.cnt_fam_members = real_field(f, pos[17], rec, col(17));
    try {
      validate(r);
    } catch (const Error& e) {
      fail(ErrorCode::MalformedRow, row_label(rec) + ": " + e.what());
    }
    if (seen.insert(r.id).second) out.push_back(std::move(r));
  }
  return out;
}

std::vector<CreditRecord> parse_credit(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) fail(ErrorCode::MissingColumn, "credit file is empty (no header row)");
  const auto pos = resolve_header(*header, kCreditColumns);

  std::vector<CreditRecord> out;
  while (auto row = reader.next()) {
    const std::size_t rec = reader.record_number();
    if (row->size() != header->size()) {
      fail(ErrorCode::MalformedRow, row_label(rec) + ": expected " + std::to_string(header->size()) +
                                        " fields, found " + std::to_string(row->size()));
    }
    CreditRecord r;
    r.id = int_field(*row, pos[0], rec, "ID");
    r.months_balance = int_field(*row, pos[1], rec, "MONTHS_BALANCE");
    if (r.months_balance > 0) malformed(rec, "MONTHS_BALANCE", "month offset must be <= 0");
    try {
      r.status = parse_status((*row)[pos[2]]);
    } catch (const Error& e) {
      fail(ErrorCode::UnknownStatus, row_label(rec) + ", column STATUS: " + e.what());
    }
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Merge, encode

RawTable merge_and_label(std::span<const ApplicationRecord> apps, std::span<const CreditRecord> credit,
                         std::span<const std::string> drop_columns, StatusCode label_threshold) {
  std::map<std::int64_t, std::vector<CreditRecord>> history;
  for (const auto& c : credit) history[c.id].push_back(c);

  auto text_col = [](std::string_view name) { return RawColumn{std::string(name), true, {}, {}}; };
  auto num_col = [](std::string_view name) { return RawColumn{std::string(name), false, {}, {}}; };

  RawTable table;
  // Table-1 order without ID.
  table.columns = {text_col("CODE_GENDER"),       text_col("FLAG_OWN_CAR"),
                   text_col("FLAG_OWN_REALTY"),   num_col("CNT_CHILDREN"),
                   num_col("AMT_INCOME_TOTAL"),   text_col("NAME_INCOME_TYPE"),
                   text_col("NAME_EDUCATION_TYPE"), text_col("NAME_FAMILY_STATUS"),
                   text_col("NAME_HOUSING_TYPE"), num_col("DAYS_BIRTH"),
                   num_col("DAYS_EMPLOYED"),      num_col("FLAG_MOBIL"),
                   num_col("FLAG_WORK_PHONE"),    num_col("FLAG_PHONE"),
                   num_col("FLAG_EMAIL"),         text_col("OCCUPATION_TYPE"),
                   num_col("CNT_FAM_MEMBERS")};

  std::unordered_set<std::int64_t> joined;
  for (const auto& a : apps) {
    auto it = history.find(a.id);
    if (it == history.end() || !joined.insert(a.id).second) continue;
    table.ids.push_back(a.id);
    table.labels.push_back(derive_label(it->second, label_threshold));
    auto& c = table.columns;
    c[0].text.push_back(a.code_gender);
    c[1].text.push_back(a.flag_own_car);
    c[2].text.push_back(a.flag_own_realty);
    c[3].numbers.push_back(static_cast<double>(a.cnt_children));
    c[4].numbers.push_back(a.amt_income_total);
    c[5].text.push_back(a.name_income_type);
    c[6].text.push_back(a.name_education_type);
    c[7].text.push_back(a.name_family_status);
    c[8].text.push_back(a.name_housing_type);
    c[9].numbers.push_back(static_cast<double>(a.days_birth));
    c[10].numbers.push_back(static_cast<double>(a.days_employed));
    c[11].numbers.push_back(a.flag_mobil);
    c[12].numbers.push_back(a.flag_work_phone);
    c[13].numbers.push_back(a.flag_phone);
    c[14].numbers.push_back(a.flag_email);
    c[15].text.push_back(a.occupation_type);
    c[16].numbers.push_back(a.cnt_fam_members);
  }
  if (table.ids.empty()) fail(ErrorCode::NoOverlap, "no customer ID appears in both tables");

  for (const auto& name : drop_columns) {
    const std::string key = upper(name);
    auto it = std::find_if(table.columns.begin(), table.columns.end(),
                           [&](const RawColumn& c) { return c.name == key; });
    if (it == table.columns.end()) fail(ErrorCode::UnknownColumn, "cannot drop unknown column '" + name + "'");
    table.columns.erase(it);
  }
  return table;
}

EncodingMap fit_encoder(const RawTable& table, std::span<const std::string> categorical_columns) {
  EncodingMap map;
  for (const auto& name : categorical_columns) {
    const RawColumn* col = table.find(name);
    if (col == nullptr) fail(ErrorCode::UnknownColumn, "no column named '" + name + "'");
    if (!col->categorical) fail(ErrorCode::UnknownColumn, "column '" + name + "' is numeric, not categorical");
    std::set<std::string> distinct(col->text.begin(), col->text.end());
    map.columns.push_back({col->name, std::vector<std::string>(distinct.begin(), distinct.end())});
  }
  return map;
}

FeatureMatrix encode(const RawTable& table, const EncodingMap& map) {
  const std::size_t n = table.rows();
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  const RawColumn* birth = nullptr;
  const RawColumn* employed = nullptr;

  for (const auto& col : table.columns) {
    if (col.size() != n) fail(ErrorCode::LengthMismatch, "column '" + col.name + "' has the wrong length");
    if (col.name == "DAYS_BIRTH") {
      birth = &col;
      continue;
    }
    if (col.name == "DAYS_EMPLOYED") {
      employed = &col;
      continue;
    }
    std::vector<double> values(n);
    if (col.categorical) {
      const ColumnEncoding* enc = map.find(col.name);
      if (enc == nullptr) fail(ErrorCode::UnknownColumn, "no encoding for categorical column '" + col.name + "'");
      for (std::size_t i = 0; i < n; ++i) {
        auto code = enc->code_of(col.text[i]);
        if (!code) {
          fail(ErrorCode::UnseenCategory, "column '" + col.name + "' has unseen value '" + col.text[i] + "'");
        }
        values[i] = static_cast<double>(*code);
      }
    } else {
      values = col.numbers;
    }
    names.push_back(col.name);
    columns.push_back(std::move(values));
  }
  if (birth != nullptr) {
    std::vector<double> years(n);
    for (std::size_t i = 0; i < n; ++i) years[i] = -birth->numbers[i] / 365.25;
    names.emplace_back(kAgeColumn);
    columns.push_back(std::move(years));
  }
  if (employed != nullptr) {
    // Positive DAYS_EMPLOYED is the not-employed sentinel.
    std::vector<double> years(n);
    for (std::size_t i = 0; i < n; ++i) years[i] = std::max(0.0, -employed->numbers[i]) / 365.25;
    names.emplace_back(kEmployedColumn);
    columns.push_back(std::move(years));
  }

  std::vector<double> values;
  values.reserve(n * columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& c : columns) values.push_back(c[i]);
  }
  return FeatureMatrix(std::move(names), std::move(values));
}

// ---------------------------------------------------------------------------
// Dataset file

void write_dataset_csv(std::ostream& out, const LabeledDataset& data) {
  std::vector<std::string> header = data.features.column_names();
  header.emplace_back("label");
  out << csv::join(header) << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto row = data.features.row(i);
    for (double v : row) out << csv::format_double(v) << ',';
    out << to_int(data.labels[i]) << '\n';
  }
}

LabeledDataset read_dataset_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() < 2 || header->back() != "label") {
    fail(ErrorCode::MissingColumn, "dataset header must list features followed by 'label'");
  }
  std::vector<std::string> names(header->begin(), header->end() - 1);
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) fail(ErrorCode::DuplicateHeader, "dataset header repeats column '" + n + "'");
  }
  std::vector<double> values;
  std::vector<DefaultLabel> labels;
  while (auto row = reader.next()) {
    const std::size_t rec = reader.record_number();
    if (row->size() != header->size()) {
      fail(ErrorCode::MalformedRow, row_label(rec) + ": expected " + std::to_string(header->size()) + " fields");
    }
    for (std::size_t j = 0; j < names.size(); ++j) values.push_back(real_field(*row, j, rec, names[j]));
    auto label = csv::parse_int(row->back());
    if (!label || (*label != 0 && *label != 1)) malformed(rec, "label", "label must be 0 or 1");
    labels.push_back(label_from_int(static_cast<int>(*label)));
  }
  return LabeledDataset(FeatureMatrix(std::move(names), std::move(values)), std::move(labels));
}

}  // namespace credrisk
