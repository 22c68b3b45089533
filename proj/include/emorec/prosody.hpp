#pragma once

// Cepstral pitch and short-time energy contours.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

#include "emorec/contour.hpp"
#include "emorec/dsp.hpp"
#include "emorec/error.hpp"
#include "emorec/segmentation.hpp"

namespace emorec {

struct PitchConfig {
  double f0_min = 50.0;
  double f0_max = 400.0;
  /// Minimum height of the cepstral peak (natural-log power units). Cepstral
  /// values away from quefrency 0 do not depend on signal level, so the floor
  /// is absolute. White-noise frames peak below ~0.27 over the 50-400 Hz range.
  double cepstral_peak_min = 0.30;
  /// A peak at best/m (m >= 2) at least this fraction of the best peak wins.
  double submultiple_ratio = 0.5;
};

inline void validate(const PitchConfig& c, int sample_rate) {
  if (!(c.f0_min > 0.0 && c.f0_min < c.f0_max))
    fail(ErrorCode::InvalidConfig, "pitch: need 0 < f0_min < f0_max");
  if (c.f0_max > sample_rate / 4.0)
    fail(ErrorCode::BadRange, "pitch: f0_max above a quarter of the sample rate");
  if (!(c.cepstral_peak_min >= 0.0))
    fail(ErrorCode::InvalidConfig, "pitch: cepstral_peak_min must be >= 0");
}

/// Pitch from the highest real-cepstrum peak within the quefrency range
/// [rate/f0_max, rate/f0_min]. The frame is Hamming windowed and the transform
/// padded to at least twice the frame length, so the longest period in range
/// does not alias. Returns nullopt when the peak is below the floor.
inline std::optional<double> cepstral_pitch(std::span<const double> frame, int sample_rate,
                                            const PitchConfig& cfg = {}) {
  validate(cfg, sample_rate);
  const auto q_lo = static_cast<std::size_t>(std::ceil(sample_rate / cfg.f0_max));
  const auto q_hi = static_cast<std::size_t>(std::floor(sample_rate / cfg.f0_min));
  const auto ceps = dsp::real_cepstrum(frame, 2 * frame.size(), dsp::Window::Hamming);
  if (q_lo < 2 || q_hi < q_lo || q_hi + 1 >= ceps.size() / 2)
    fail(ErrorCode::BadRange, "quefrency window empty for this frame length and sample rate");
  std::size_t best = q_lo;
  for (std::size_t q = q_lo + 1; q <= q_hi; ++q)
    if (ceps[q] > ceps[best]) best = q;
  if (!(ceps[best] >= cfg.cepstral_peak_min)) return std::nullopt;
  // A strong peak at an integer fraction of the winning quefrency means the
  // winner is a rahmonic (multiple of the true period); take the shortest.
  for (std::size_t m = best / q_lo; m >= 2; --m) {
    const double target = static_cast<double>(best) / static_cast<double>(m);
    const auto lo = std::max(q_lo, static_cast<std::size_t>(std::floor(target)) - 1);
    const auto hi = std::min(q_hi, static_cast<std::size_t>(std::ceil(target)) + 1);
    std::size_t cand = lo;
    for (std::size_t q = lo + 1; q <= hi; ++q)
      if (ceps[q] > ceps[cand]) cand = q;
    if (ceps[cand] >= cfg.submultiple_ratio * ceps[best]) {
      best = cand;
      break;
    }
  }
  // Parabolic refinement of the peak position.
  const double a = ceps[best - 1], b = ceps[best], c = ceps[best + 1];
  const double denom = a - 2.0 * b + c;
  double offset = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
  offset = std::clamp(offset, -0.5, 0.5);
  const double f0 = sample_rate / (static_cast<double>(best) + offset);
  return std::clamp(f0, cfg.f0_min, cfg.f0_max);
}

/// Pitch of every voiced frame where one is detected (absent frames skipped).
inline Contour pitch_contour(const dsp::FrameSequence& frames, const Segmentation& seg,
                             const PitchConfig& cfg = {}) {
  if (seg.frame_labels.size() != frames.size())
    fail(ErrorCode::DimensionMismatch, "segmentation does not match the frame sequence");
  Contour out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (seg.frame_labels[i] != SegmentClass::Voiced) continue;
    if (auto f0 = cepstral_pitch(frames[i], frames.sample_rate(), cfg))
      out.push(frames.frame_center_seconds(i), *f0);
  }
  return out;
}

/// Short-time energy of the frames carrying `cls`, in frame order.
inline Contour energy_contour(const dsp::FrameSequence& frames, const Segmentation& seg,
                              SegmentClass cls) {
  if (seg.frame_labels.size() != frames.size())
    fail(ErrorCode::DimensionMismatch, "segmentation does not match the frame sequence");
  Contour out;
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (seg.frame_labels[i] == cls)
      out.push(frames.frame_center_seconds(i), dsp::short_time_energy(frames[i]));
  return out;
}

}  // namespace emorec
