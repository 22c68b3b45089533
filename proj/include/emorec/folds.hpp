#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "emorec/error.hpp"
#include "emorec/random.hpp"

namespace emorec {

/// Stratified k-fold partition of row indices. Rows of each class (ascending
/// class id) are shuffled with the seed and dealt round-robin, the dealing
/// position carrying over between classes, so every class is spread over the
/// folds with per-fold counts differing by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                              std::size_t k, std::uint64_t seed) {
  if (k == 0) fail(ErrorCode::BadRange, "fold count must be positive");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (auto& [cls, rows] : by_class) {
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t r : rows) folds[pos++ % k].push_back(r);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

/// Fold index of every row for the partition above.
inline std::vector<std::size_t> fold_assignment(std::span<const int> labels, std::size_t k,
                                                std::uint64_t seed) {
  std::vector<std::size_t> out(labels.size(), 0);
  const auto folds = stratified_folds(labels, k, seed);
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (std::size_t r : folds[f]) out[r] = f;
  return out;
}

}  // namespace emorec
