#pragma once

// Accuracy as a function of the number of top-ranked features.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "emorec/evaluation.hpp"

namespace emorec {

struct SweepCurve {
  std::vector<std::pair<std::size_t, double>> points;  // (k, accuracy), k increasing
  std::size_t best_k = 0;
};

/// step, 2*step, ... up to d, with d itself always last.
inline std::vector<std::size_t> sweep_counts(std::size_t d, std::size_t step) {
  if (step < 1) fail(ErrorCode::InvalidConfig, "sweep step must be >= 1");
  std::vector<std::size_t> ks;
  for (std::size_t k = step; k < d; k += step) ks.push_back(k);
  if (d > 0) ks.push_back(d);
  return ks;
}

/// Cross-validated accuracy on the first k columns of `ranking` for each k.
/// Ranking placement is fixed by the caller; `opt.selection` is ignored.
inline SweepCurve sweep(const Matrix& x, std::span<const int> labels,
                        std::span<const std::size_t> ranking, const ClassifierConfig& cfg,
                        std::span<const std::size_t> ks, CvOptions opt) {
  if (ranking.size() != x.cols())
    fail(ErrorCode::DimensionMismatch, "ranking does not cover every feature column");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1 || ks[i] > x.cols())
      fail(ErrorCode::BadRange, "sweep count " + std::to_string(ks[i]) + " outside [1, " +
                                    std::to_string(x.cols()) + "]");
    if (i > 0 && ks[i] <= ks[i - 1]) fail(ErrorCode::BadRange, "sweep counts must increase");
  }
  opt.selection = SelectionMode::None;
  SweepCurve curve;
  double best = -1.0;
  for (std::size_t k : ks) {
    const Matrix sub = x.select_columns(ranking.first(k));
    const double acc = cross_validate(sub, labels, cfg, opt).mean_accuracy;
    curve.points.emplace_back(k, acc);
    if (acc > best) {
      best = acc;
      curve.best_k = k;
    }
  }
  return curve;
}

}  // namespace emorec
