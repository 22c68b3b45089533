#pragma once

// Interval-duration rhythm metrics (VarcoX, nPVI, interval statistics, rate)
// and the six temporal duration ratios.

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "emorec/error.hpp"
#include "emorec/schema.hpp"
#include "emorec/segmentation.hpp"

namespace emorec {

struct IntervalDurations {
  std::vector<double> voiced;
  std::vector<double> unvoiced;
  std::vector<double> pause;
  double total = 0.0;
};

inline IntervalDurations interval_durations(const Segmentation& seg) {
  IntervalDurations out;
  for (const auto& iv : seg.intervals) {
    const double d = seg.duration(iv);
    switch (iv.cls) {
      case SegmentClass::Voiced: out.voiced.push_back(d); break;
      case SegmentClass::Unvoiced: out.unvoiced.push_back(d); break;
      case SegmentClass::Pause: out.pause.push_back(d); break;
    }
  }
  out.total = seg.total_duration();
  return out;
}

inline double mean_of(std::span<const double> d) {
  if (d.empty()) return 0.0;
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

/// Population standard deviation; 0 for empty input.
inline double pop_std(std::span<const double> d) {
  if (d.empty()) return 0.0;
  const double m = mean_of(d);
  double acc = 0.0;
  for (double x : d) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(d.size()));
}

/// 100 * std / mean. Zero for fewer than two intervals or a zero mean.
inline double varco(std::span<const double> d) {
  if (d.size() < 2) return 0.0;
  const double m = mean_of(d);
  if (m == 0.0) return 0.0;
  return pop_std(d) * 100.0 / m;
}

/// Normalized pairwise variability index over consecutive pairs:
/// 100/(m-1) * sum |d_k - d_{k+1}| / ((d_k + d_{k+1}) / 2). Zero for m < 2.
inline double npvi(std::span<const double> d) {
  if (d.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const double mean_pair = 0.5 * (d[k] + d[k + 1]);
    if (mean_pair > 0.0) acc += std::abs(d[k] - d[k + 1]) / mean_pair;
  }
  return 100.0 * acc / static_cast<double>(d.size() - 1);
}

/// The 13 rhythm values, in kRhythmNames order.
inline std::array<double, kRhythmFeatures> rhythm_block(const IntervalDurations& iv) {
  if (!(iv.total > 0.0)) fail(ErrorCode::ZeroDuration, "utterance has zero total duration");
  const std::array<std::span<const double>, 3> groups = {iv.voiced, iv.unvoiced, iv.pause};
  std::array<double, kRhythmFeatures> out{};
  for (std::size_t g = 0; g < 3; ++g) {
    out[g] = mean_of(groups[g]);
    out[3 + g] = pop_std(groups[g]);
    out[6 + g] = varco(groups[g]);
    out[9 + g] = npvi(groups[g]);
  }
  out[12] = static_cast<double>(iv.voiced.size()) / iv.total;
  return out;
}

struct TemporalRatios {
  std::array<double, kTemporalFeatures> values{};
  /// Names of ratios whose denominator was zero (reported as 0).
  std::vector<std::string> degenerate;
};

/// P/(V+U), V/U, U/(U+V), V/(U+V), V/P, U/P over summed class durations.
inline TemporalRatios temporal_ratios(const IntervalDurations& iv) {
  const auto sum = [](const std::vector<double>& d) {
    return std::accumulate(d.begin(), d.end(), 0.0);
  };
  const double v = sum(iv.voiced), u = sum(iv.unvoiced), p = sum(iv.pause);
  const std::array<std::pair<double, double>, kTemporalFeatures> parts = {{
      {p, v + u}, {v, u}, {u, u + v}, {v, u + v}, {v, p}, {u, p},
  }};
  TemporalRatios out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto [num, den] = parts[i];
    if (den > 0.0) {
      out.values[i] = num / den;
    } else {
      out.values[i] = 0.0;
      out.degenerate.emplace_back(kTemporalNames[i]);
    }
  }
  return out;
}

}  // namespace emorec
