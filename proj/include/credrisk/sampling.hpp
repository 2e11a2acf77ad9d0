#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "credrisk/ingest.hpp"

namespace credrisk {

struct SplitConfig {
  double train_fraction = 0.7;
  std::uint64_t seed = 42;
  bool stratified = true;

  void validate() const;
};

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  double target_ratio = 1.0;  // minority / majority after resampling
  std::uint64_t seed = 42;

  void validate() const;
};

struct SplitResult {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_indices;  // ascending row indices into the input
  std::vector<std::size_t> test_indices;
};

// Each class contributes round(train_fraction * class_count) rows to train.
// Both parts keep the input row order.
SplitResult stratified_split(const LabeledDataset& data, const SplitConfig& cfg);

// Appends synthetic minority rows x + u * (neighbor - x) until the minority
// count reaches round(target_ratio * majority). Neighbors are the exact
// k nearest minority rows by Euclidean distance, ties to the lower index.
LabeledDataset smote(const LabeledDataset& train, const SmoteConfig& cfg);

// k nearest minority neighbors (positions within `points`) of every point.
std::vector<std::vector<std::size_t>> nearest_neighbors(const std::vector<std::vector<double>>& points,
                                                        std::size_t k);

}  // namespace credrisk
