#pragma once

// Contour statistics, derivative contours and assembly of the 487-value
// feature vector for one utterance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emorec/audio_clip.hpp"
#include "emorec/contour.hpp"
#include "emorec/dsp.hpp"
#include "emorec/error.hpp"
#include "emorec/prosody.hpp"
#include "emorec/rhythm.hpp"
#include "emorec/schema.hpp"
#include "emorec/segmentation.hpp"
#include "emorec/spectral.hpp"

namespace emorec {

struct ContourStats {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  bool degenerate = false;  // empty input, all four reported as 0
};

inline ContourStats contour_stats(std::span<const double> c) {
  if (c.empty()) return {0.0, 0.0, 0.0, 0.0, true};
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  return {mean_of(c), pop_std(c), *lo, *hi, false};
}

/// Central difference with replicated endpoints; order 2 applies it twice.
/// Contours shorter than 3 give an all-zero derivative.
inline std::vector<double> derivative(std::span<const double> c, int order = 1) {
  if (order != 1 && order != 2) fail(ErrorCode::BadRange, "derivative order must be 1 or 2");
  const std::size_t n = c.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  for (std::size_t t = 0; t < n; ++t) {
    const double next = c[t + 1 < n ? t + 1 : n - 1];
    const double prev = c[t > 0 ? t - 1 : 0];
    d[t] = 0.5 * (next - prev);
  }
  return order == 1 ? d : derivative(d, 1);
}

/// Per-class frame contours that feed the contour-statistics blocks.
struct UtteranceContours {
  std::array<std::vector<double>, kNumMfcc> mfcc_voiced;
  std::array<std::vector<double>, kNumMfcc> mfcc_unvoiced;
  std::vector<double> loudness_voiced;
  std::vector<double> loudness_unvoiced;
  std::vector<double> pitch;
  std::vector<double> energy_voiced;
  std::vector<double> energy_unvoiced;
};

struct FeatureVector {
  std::vector<double> values;
  /// Schema names imputed with 0 because their contour or denominator was empty.
  std::vector<std::string> degenerate;
};

/// Places every block at its schema position. Layout per contour: derivs
/// org, d1, d2, each with mean, std, min, max.
inline FeatureVector assemble(const UtteranceContours& contours,
                              const std::array<double, kRhythmFeatures>& rhythm,
                              const TemporalRatios& ratios) {
  const auto& schema = feature_schema();
  FeatureVector fv;
  fv.values.reserve(kNumFeatures);
  const auto block = [&](std::span<const double> contour) {
    const std::vector<double> org(contour.begin(), contour.end());
    const std::array<std::vector<double>, kNumDerivs> derivs = {org, derivative(org, 1),
                                                                 derivative(org, 2)};
    for (const auto& d : derivs) {
      const std::size_t at = fv.values.size();
      const auto s = contour_stats(d);
      fv.values.insert(fv.values.end(), {s.mean, s.std, s.min, s.max});
      if (s.degenerate)
        for (std::size_t k = 0; k < kNumStats; ++k) fv.degenerate.push_back(schema.name(at + k));
    }
  };
  for (const auto& c : contours.mfcc_voiced) block(c);
  for (const auto& c : contours.mfcc_unvoiced) block(c);
  block(contours.loudness_voiced);
  block(contours.loudness_unvoiced);
  block(contours.pitch);
  block(contours.energy_voiced);
  block(contours.energy_unvoiced);
  fv.values.insert(fv.values.end(), rhythm.begin(), rhythm.end());
  fv.values.insert(fv.values.end(), ratios.values.begin(), ratios.values.end());
  fv.degenerate.insert(fv.degenerate.end(), ratios.degenerate.begin(), ratios.degenerate.end());

  if (fv.values.size() != kNumFeatures)
    fail(ErrorCode::SchemaViolation, "assembled " + std::to_string(fv.values.size()) +
                                         " values, schema has " + std::to_string(kNumFeatures));
  for (std::size_t i = 0; i < fv.values.size(); ++i)
    if (!std::isfinite(fv.values[i]))
      fail(ErrorCode::SchemaViolation, "non-finite value for " + schema.name(i));
  return fv;
}

struct BarkConfig {
  double fmin = 0.0;
  double fmax = 0.0;  // 0 selects the Nyquist frequency
  double spacing = 1.0;
  double lower_slope = 1.0;
  double upper_slope = 2.5;
};

struct ExtractionConfig {
  VadConfig vad;
  MfccConfig mfcc;
  PitchConfig pitch;
  BarkConfig bark;
};

/// Everything computed for one utterance on the way to its feature vector.
struct UtteranceAnalysis {
  dsp::FrameSequence frames;
  FrameAnalysis frame_analysis;
  Segmentation segmentation;
  UtteranceContours contours;
  std::array<double, kRhythmFeatures> rhythm{};
  TemporalRatios ratios;
};

inline UtteranceAnalysis analyze_utterance(const AudioClip& clip, const ExtractionConfig& cfg = {}) {
  validate(clip);
  validate(cfg.vad);
  if (cfg.mfcc.n_coeffs != kNumMfcc)
    fail(ErrorCode::InvalidConfig, "the feature schema needs exactly 17 MFCCs");
  UtteranceAnalysis a;
  a.frames = dsp::frame_signal(clip, cfg.vad.frame_ms, cfg.vad.overlap);
  a.frame_analysis = analyze_frames(a.frames, cfg.vad);
  a.segmentation = segment(a.frames, a.frame_analysis, cfg.vad);

  const int rate = clip.sample_rate;
  const MfccAnalyzer mfcc(cfg.mfcc, a.frames.frame_len(), rate);
  const double bark_fmax = cfg.bark.fmax == 0.0 ? rate / 2.0 : cfg.bark.fmax;
  const LoudnessAnalyzer loudness(
      build_bark_bank(cfg.bark.fmin, bark_fmax, cfg.bark.spacing, cfg.bark.lower_slope,
                      cfg.bark.upper_slope),
      dsp::next_pow2(a.frames.frame_len()) / 2 + 1, rate);

  auto& c = a.contours;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const SegmentClass cls = a.segmentation.frame_labels[i];
    if (cls == SegmentClass::Pause) continue;
    const bool voiced = cls == SegmentClass::Voiced;
    const auto frame = a.frames[i];
    const auto coeffs = mfcc.compute(frame);
    auto& mfcc_dst = voiced ? c.mfcc_voiced : c.mfcc_unvoiced;
    for (std::size_t k = 0; k < kNumMfcc; ++k) mfcc_dst[k].push_back(coeffs[k]);
    const double loud = loudness.total_loudness(dsp::power_spectrum(frame, dsp::Window::Hamming));
    (voiced ? c.loudness_voiced : c.loudness_unvoiced).push_back(loud);
    (voiced ? c.energy_voiced : c.energy_unvoiced).push_back(a.frame_analysis.energy[i]);
  }
  c.pitch = pitch_contour(a.frames, a.segmentation, cfg.pitch).values;

  const auto durations = interval_durations(a.segmentation);
  a.rhythm = rhythm_block(durations);
  a.ratios = temporal_ratios(durations);
  return a;
}

inline FeatureVector extract_features(const AudioClip& clip, const ExtractionConfig& cfg = {}) {
  const auto a = analyze_utterance(clip, cfg);
  return assemble(a.contours, a.rhythm, a.ratios);
}

}  // namespace emorec
