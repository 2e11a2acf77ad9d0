#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "credrisk/schema.hpp"

namespace credrisk {

// Dense row-major n x d matrix of finite values with unique column names.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> column_names, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }

  std::optional<std::size_t> column_index(std::string_view name) const;
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::size_t rows_ = 0;
};

struct LabeledDataset {
  FeatureMatrix features;
  std::vector<DefaultLabel> labels;
  // Parallel to labels; set for rows created by oversampling.
  std::vector<bool> synthetic;

  LabeledDataset() = default;
  LabeledDataset(FeatureMatrix x, std::vector<DefaultLabel> y);
  LabeledDataset(FeatureMatrix x, std::vector<DefaultLabel> y, std::vector<bool> synthetic_flags);

  std::size_t size() const { return labels.size(); }
  std::size_t count(DefaultLabel label) const;
  bool has_both_classes() const { return count(DefaultLabel::Good) > 0 && count(DefaultLabel::Default) > 0; }
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

// Raw merged table prior to encoding. Each column is either numeric or
// categorical (text).
struct RawColumn {
  std::string name;
  bool categorical = false;
  std::vector<double> numbers;
  std::vector<std::string> text;

  std::size_t size() const { return categorical ? text.size() : numbers.size(); }
};

struct RawTable {
  std::vector<RawColumn> columns;
  std::vector<std::int64_t> ids;
  std::vector<DefaultLabel> labels;

  const RawColumn* find(std::string_view name) const;
  std::size_t rows() const { return ids.size(); }
};

struct ColumnEncoding {
  std::string column;
  std::vector<std::string> categories;  // ascending; index = code

  std::optional<std::size_t> code_of(std::string_view value) const;
};

struct EncodingMap {
  std::vector<ColumnEncoding> columns;

  const ColumnEncoding* find(std::string_view column) const;
  std::string to_json() const;
  static EncodingMap from_json(std::string_view text);
};

// Feature columns removed after merging; keeps 17 -> 14.
inline const std::vector<std::string> kDefaultDropColumns = {"FLAG_MOBIL", "FLAG_WORK_PHONE", "FLAG_EMAIL"};

inline const std::vector<std::string> kDefaultCategoricalColumns = {
    "CODE_GENDER",        "FLAG_OWN_CAR",       "FLAG_OWN_REALTY",   "NAME_INCOME_TYPE",
    "NAME_EDUCATION_TYPE", "NAME_FAMILY_STATUS", "NAME_HOUSING_TYPE", "OCCUPATION_TYPE",
};

inline constexpr std::string_view kAgeColumn = "age_years";
inline constexpr std::string_view kEmployedColumn = "employed_years";

std::vector<ApplicationRecord> parse_applications(std::istream& in);
std::vector<CreditRecord> parse_credit(std::istream& in);

// Inner join on ID; labels come from derive_label over each customer's
// credit rows. ID is never a feature.
RawTable merge_and_label(std::span<const ApplicationRecord> apps,
                         std::span<const CreditRecord> credit,
                         std::span<const std::string> drop_columns = kDefaultDropColumns,
                         StatusCode label_threshold = StatusCode::DPD60);

EncodingMap fit_encoder(const RawTable& table,
                        std::span<const std::string> categorical_columns = kDefaultCategoricalColumns);

// Categorical columns become their codes. DAYS_BIRTH and DAYS_EMPLOYED are
// replaced by age_years and employed_years, appended after the other
// columns.
FeatureMatrix encode(const RawTable& table, const EncodingMap& map);

struct SyntheticTables {
  std::string applications_csv;
  std::string credit_csv;
};

// Schema-compatible synthetic customers. Exactly round(default_rate * n)
// customers receive a 60+ days overdue month; who defaults depends on
// non-monotone interactions of age, income and employment.
SyntheticTables generate_synthetic(std::size_t n_customers, double default_rate, std::uint64_t seed);

// Prepared dataset file: header of feature names followed by "label".
void write_dataset_csv(std::ostream& out, const LabeledDataset& data);
LabeledDataset read_dataset_csv(std::istream& in);

}  // namespace credrisk
