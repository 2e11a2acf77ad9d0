#pragma once

#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "credrisk/ingest.hpp"
#include "credrisk/random.hpp"

namespace credrisk::testing {

inline std::vector<std::string> numbered_columns(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

inline LabeledDataset make_dataset(std::vector<std::vector<double>> rows, std::vector<int> labels) {
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  std::vector<DefaultLabel> y;
  for (int l : labels) y.push_back(label_from_int(l));
  return LabeledDataset(FeatureMatrix(numbered_columns(d), std::move(flat)), std::move(y));
}

// Gaussian blobs; the positive class is shifted by `shift` in every
// coordinate.
inline LabeledDataset random_dataset(Rng& rng, std::size_t n0, std::size_t n1, std::size_t d, double shift = 1.0) {
  std::vector<double> flat;
  std::vector<DefaultLabel> y;
  for (std::size_t i = 0; i < n0 + n1; ++i) {
    const bool pos = i >= n0;
    for (std::size_t j = 0; j < d; ++j) flat.push_back(rng.normal() + (pos ? shift : 0.0));
    y.push_back(pos ? DefaultLabel::Default : DefaultLabel::Good);
  }
  return LabeledDataset(FeatureMatrix(numbered_columns(d), std::move(flat)), std::move(y));
}

// Values drawn from a small grid so ties and repeated values are common.
inline LabeledDataset random_grid_dataset(Rng& rng, std::size_t n, std::size_t d, std::size_t levels) {
  std::vector<double> flat;
  std::vector<DefaultLabel> y;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) flat.push_back(static_cast<double>(rng.index(levels)) * 0.5 - 1.0);
    y.push_back(rng.bernoulli(0.4) ? DefaultLabel::Default : DefaultLabel::Good);
  }
  return LabeledDataset(FeatureMatrix(numbered_columns(d), std::move(flat)), std::move(y));
}

// Generated tables pushed through merge, label and encode in memory.
inline LabeledDataset synthetic_dataset(std::size_t n, double rate, std::uint64_t seed) {
  const auto tables = generate_synthetic(n, rate, seed);
  std::istringstream app(tables.applications_csv);
  std::istringstream credit(tables.credit_csv);
  const auto apps = parse_applications(app);
  const auto history = parse_credit(credit);
  const RawTable table = merge_and_label(apps, history);
  return LabeledDataset(encode(table, fit_encoder(table)), table.labels);
}

}  // namespace credrisk::testing
