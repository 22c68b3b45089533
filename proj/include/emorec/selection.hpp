#pragma once

// Information-gain-ratio attribute ranking. Numeric attributes are discretized
// with Fayyad-Irani MDL splitting (or equal-frequency bins), scored by gain
// ratio on each training partition of a stratified k-fold split, and ranked
// by mean score across folds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "emorec/dataset.hpp"
#include "emorec/error.hpp"
#include "emorec/folds.hpp"
#include "emorec/parallel.hpp"

namespace emorec {

namespace detail {

inline double entropy_bits(std::span<const std::size_t> counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

inline std::size_t distinct_nonzero(std::span<const std::size_t> counts) {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
}

/// Dense 0..K-1 class ids, preserving ascending order of the input ids.
inline std::vector<int> dense_classes(std::span<const int> labels, std::size_t* num_classes) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [k, v] : ids) v = next++;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  *num_classes = ids.size();
  return out;
}

struct SortedColumn {
  std::vector<double> values;
  std::vector<int> classes;
};

inline void mdl_split(const SortedColumn& col, std::size_t begin, std::size_t end,
                      std::size_t num_classes, std::vector<double>& cuts) {
  const std::size_t n = end - begin;
  if (n < 2) return;
  std::vector<std::size_t> total(num_classes, 0), left(num_classes, 0), right(num_classes);
  for (std::size_t i = begin; i < end; ++i) ++total[static_cast<std::size_t>(col.classes[i])];
  const double ent = entropy_bits(total, n);
  if (ent == 0.0) return;

  double best_e = std::numeric_limits<double>::infinity();
  std::size_t best_at = 0;
  std::vector<std::size_t> best_left;
  for (std::size_t i = begin + 1; i < end; ++i) {
    ++left[static_cast<std::size_t>(col.classes[i - 1])];
    if (!(col.values[i - 1] < col.values[i])) continue;
    const std::size_t nl = i - begin, nr = end - i;
    for (std::size_t c = 0; c < num_classes; ++c) right[c] = total[c] - left[c];
    const double e = (static_cast<double>(nl) * entropy_bits(left, nl) +
                      static_cast<double>(nr) * entropy_bits(right, nr)) /
                     static_cast<double>(n);
    if (e < best_e) {
      best_e = e;
      best_at = i;
      best_left = left;
    }
  }
  if (best_at == 0) return;

  const std::size_t nl = best_at - begin, nr = end - best_at;
  for (std::size_t c = 0; c < num_classes; ++c) right[c] = total[c] - best_left[c];
  const double ent_l = entropy_bits(best_left, nl), ent_r = entropy_bits(right, nr);
  const double gain = ent - best_e;
  const auto k = static_cast<double>(distinct_nonzero(total));
  const auto k1 = static_cast<double>(distinct_nonzero(best_left));
  const auto k2 = static_cast<double>(distinct_nonzero(right));
  const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * ent - k1 * ent_l - k2 * ent_r);
  const double threshold =
      (std::log2(static_cast<double>(n - 1)) + delta) / static_cast<double>(n);
  if (!(gain > threshold)) return;

  mdl_split(col, begin, best_at, num_classes, cuts);
  cuts.push_back(0.5 * (col.values[best_at - 1] + col.values[best_at]));
  mdl_split(col, best_at, end, num_classes, cuts);
}

inline SortedColumn sort_column(std::span<const double> values, std::span<const int> dense) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  SortedColumn col;
  col.values.reserve(order.size());
  col.classes.reserve(order.size());
  for (std::size_t i : order) {
    col.values.push_back(values[i]);
    col.classes.push_back(dense[i]);
  }
  return col;
}

}  // namespace detail

/// Fayyad-Irani recursive entropy splitting with the MDL acceptance test.
/// Cut points are midpoints between adjacent distinct values, sorted ascending.
inline std::vector<double> mdl_discretize(std::span<const double> values,
                                          std::span<const int> labels) {
  if (values.size() != labels.size())
    fail(ErrorCode::DimensionMismatch, "values and labels differ in length");
  std::size_t k = 0;
  const auto dense = detail::dense_classes(labels, &k);
  const auto col = detail::sort_column(values, dense);
  std::vector<double> cuts;
  detail::mdl_split(col, 0, col.values.size(), k, cuts);
  return cuts;
}

/// Cuts at the boundaries of `bins` equal-count groups (duplicates collapse).
inline std::vector<double> equal_frequency_cuts(std::span<const double> values, std::size_t bins = 10) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  const std::size_t n = sorted.size();
  for (std::size_t b = 1; b < bins && n > 0; ++b) {
    const std::size_t at = b * n / bins;
    if (at == 0 || at >= n || !(sorted[at - 1] < sorted[at])) continue;
    const double cut = 0.5 * (sorted[at - 1] + sorted[at]);
    if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
  }
  return cuts;
}

/// Bin index of each value: the number of cuts at or below it.
inline std::vector<int> apply_cuts(std::span<const double> values, std::span<const double> cuts) {
  std::vector<int> bins(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    bins[i] = static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), values[i]) - cuts.begin());
  return bins;
}

/// (H(class) - H(class | bin)) / H(bin), base-2 logs; 0 when H(bin) = 0.
inline double gain_ratio(std::span<const int> bins, std::span<const int> labels) {
  if (bins.size() != labels.size())
    fail(ErrorCode::DimensionMismatch, "bins and labels differ in length");
  const std::size_t n = bins.size();
  if (n == 0) return 0.0;
  std::size_t nc = 0, nb = 0;
  const auto cls = detail::dense_classes(labels, &nc);
  const auto bin = detail::dense_classes(bins, &nb);
  std::vector<std::size_t> class_counts(nc, 0), bin_counts(nb, 0), joint(nb * nc, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(cls[i]);
    const auto b = static_cast<std::size_t>(bin[i]);
    ++class_counts[c];
    ++bin_counts[b];
    ++joint[b * nc + c];
  }
  const double h_class = detail::entropy_bits(class_counts, n);
  const double h_bins = detail::entropy_bits(bin_counts, n);
  if (h_bins <= 0.0 || h_class <= 0.0) return 0.0;
  double h_cond = 0.0;
  for (std::size_t b = 0; b < nb; ++b)
    h_cond += static_cast<double>(bin_counts[b]) / static_cast<double>(n) *
              detail::entropy_bits(std::span<const std::size_t>(joint.data() + b * nc, nc),
                                   bin_counts[b]);
  return std::max(0.0, (h_class - h_cond) / h_bins);
}

enum class Discretizer { Mdl, EqualFrequency };

inline double feature_gain_ratio(std::span<const double> values, std::span<const int> labels,
                                 Discretizer method = Discretizer::Mdl) {
  const auto cuts = method == Discretizer::Mdl ? mdl_discretize(values, labels)
                                               : equal_frequency_cuts(values, 10);
  return gain_ratio(apply_cuts(values, cuts), labels);
}

struct RankedFeatures {
  std::vector<std::size_t> order;                 // best first
  std::vector<double> scores;                     // mean gain ratio, by feature index
  std::vector<std::vector<std::size_t>> fold_ranks;  // per-fold order, best first

  std::vector<std::size_t> top(std::size_t k) const {
    k = std::min(k, order.size());
    return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)};
  }
};

struct RankOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  Discretizer discretizer = Discretizer::Mdl;
  unsigned jobs = 1;
};

namespace detail {

inline std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace detail

/// Gain ratio of every column on each fold's training partition, ranked by
/// the mean over folds (ties by column index). `fold_of` gives each row's
/// fold; when empty, a stratified assignment is drawn from the seed.
inline RankedFeatures rank_cv(const Matrix& x, std::span<const int> labels, const RankOptions& opt,
                              std::span<const std::size_t> fold_of = {}) {
  if (x.rows() != labels.size()) fail(ErrorCode::DimensionMismatch, "rows and labels differ");
  if (opt.folds < 2) fail(ErrorCode::BadRange, "ranking needs at least two folds");
  std::map<int, std::size_t> per_class;
  for (int l : labels) ++per_class[l];
  for (const auto& [cls, count] : per_class)
    if (count < opt.folds)
      fail(ErrorCode::TooFewInstances, "class " + std::to_string(cls) + " has " +
                                           std::to_string(count) + " instances, fewer than " +
                                           std::to_string(opt.folds) + " folds");
  std::vector<std::size_t> assignment;
  if (fold_of.empty()) {
    assignment = fold_assignment(labels, opt.folds, opt.seed);
    fold_of = assignment;
  } else if (fold_of.size() != labels.size()) {
    fail(ErrorCode::DimensionMismatch, "fold assignment does not match the row count");
  }

  const std::size_t d = x.cols();
  std::vector<std::vector<double>> fold_scores(opt.folds, std::vector<double>(d, 0.0));
  for (std::size_t f = 0; f < opt.folds; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t r = 0; r < labels.size(); ++r)
      if (fold_of[r] != f) train.push_back(r);
    std::vector<int> y(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) y[i] = labels[train[i]];
    parallel_for(d, opt.jobs, [&](std::size_t c) {
      std::vector<double> col(train.size());
      for (std::size_t i = 0; i < train.size(); ++i) col[i] = x(train[i], c);
      fold_scores[f][c] = feature_gain_ratio(col, y, opt.discretizer);
    });
  }

  RankedFeatures out;
  out.scores.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    double acc = 0.0;
    for (std::size_t f = 0; f < opt.folds; ++f) acc += fold_scores[f][c];
    out.scores[c] = acc / static_cast<double>(opt.folds);
  }
  out.order = detail::order_by_score(out.scores);
  for (const auto& fs : fold_scores) out.fold_ranks.push_back(detail::order_by_score(fs));
  return out;
}

}  // namespace emorec
