#pragma once

// Framing and per-frame primitives shared by segmentation and feature
// extraction. DFT convention: unnormalized forward transform, 1/N inverse.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "emorec/audio_clip.hpp"
#include "emorec/error.hpp"

namespace emorec::dsp {

inline constexpr double kLogFloor = 1e-10;

enum class Window { Rectangular, Hamming };

/// Equal-length, half-overlapping frames. Frame i starts at sample i * hop;
/// the ragged tail is zero-padded.
class FrameSequence {
 public:
  FrameSequence() = default;
  FrameSequence(std::vector<double> data, std::size_t frame_len, std::size_t hop,
                std::size_t count, std::size_t num_samples, int sample_rate)
      : data_(std::move(data)),
        frame_len_(frame_len),
        hop_(hop),
        count_(count),
        num_samples_(num_samples),
        sample_rate_(sample_rate) {}

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::size_t frame_len() const { return frame_len_; }
  std::size_t hop() const { return hop_; }
  std::size_t num_samples() const { return num_samples_; }
  int sample_rate() const { return sample_rate_; }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * frame_len_, frame_len_};
  }

  double frame_start_seconds(std::size_t i) const {
    return static_cast<double>(i * hop_) / sample_rate_;
  }
  double frame_center_seconds(std::size_t i) const {
    return (static_cast<double>(i * hop_) + 0.5 * static_cast<double>(frame_len_)) / sample_rate_;
  }

 private:
  std::vector<double> data_;
  std::size_t frame_len_ = 0;
  std::size_t hop_ = 0;
  std::size_t count_ = 0;
  std::size_t num_samples_ = 0;
  int sample_rate_ = 0;
};

inline FrameSequence frame_signal(const AudioClip& clip, double frame_ms = 30.0,
                                  double overlap = 0.5) {
  if (clip.sample_rate <= 0) fail(ErrorCode::BadRange, "sample rate must be positive");
  if (!(frame_ms > 0.0) || !(overlap >= 0.0 && overlap < 1.0))
    fail(ErrorCode::BadRange, "invalid frame length or overlap");
  const auto frame_len =
      static_cast<std::size_t>(std::lround(frame_ms * clip.sample_rate / 1000.0));
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(frame_len) * (1.0 - overlap))));
  const std::size_t n = clip.samples.size();
  if (frame_len == 0 || n < frame_len)
    fail(ErrorCode::ClipTooShort, "clip of " + std::to_string(n) +
                                      " samples is shorter than one frame of " +
                                      std::to_string(frame_len));
  const std::size_t count = (n - frame_len + hop - 1) / hop + 1;
  std::vector<double> data(count * frame_len, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * hop;
    const std::size_t avail = std::min(frame_len, n - start);
    std::copy_n(clip.samples.begin() + static_cast<std::ptrdiff_t>(start), avail,
                data.begin() + static_cast<std::ptrdiff_t>(i * frame_len));
  }
  return FrameSequence(std::move(data), frame_len, hop, count, n, clip.sample_rate);
}

inline double short_time_energy(std::span<const double> frame) {
  if (frame.empty()) return 0.0;
  double acc = 0.0;
  for (double x : frame) acc += x * x;
  return acc / static_cast<double>(frame.size());
}

/// Fraction of adjacent sample pairs whose signs differ. Zero counts as positive.
inline double zero_crossing_rate(std::span<const double> frame) {
  if (frame.size() < 2) fail(ErrorCode::FrameTooShort, "ZCR needs at least two samples");
  std::size_t crossings = 0;
  bool prev_neg = frame[0] < 0.0;
  for (std::size_t i = 1; i < frame.size(); ++i) {
    const bool neg = frame[i] < 0.0;
    crossings += neg != prev_neg;
    prev_neg = neg;
  }
  return static_cast<double>(crossings) / static_cast<double>(frame.size() - 1);
}

inline std::size_t next_pow2(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

/// In-place iterative radix-2 FFT. `inverse` applies the 1/N scale.
inline void fft(std::vector<std::complex<double>>& a, bool inverse = false) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (!std::has_single_bit(n)) fail(ErrorCode::BadRange, "FFT size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < half; ++k) {
        // Recompute every 64 steps to limit twiddle drift.
        if ((k & 63) == 0 && k != 0) {
          const double a_k = ang * static_cast<double>(k);
          w = {std::cos(a_k), std::sin(a_k)};
        }
        const auto u = a[i + k];
        const auto v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= scale;
  }
}

inline double hamming(std::size_t n, std::size_t length) {
  if (length <= 1) return 1.0;
  return 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(length - 1));
}

inline std::vector<std::complex<double>> windowed_spectrum(std::span<const double> frame,
                                                           Window window, std::size_t n_fft) {
  std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
  const std::size_t n = std::min(frame.size(), n_fft);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = window == Window::Hamming ? hamming(i, frame.size()) : 1.0;
    buf[i] = {frame[i] * w, 0.0};
  }
  fft(buf);
  return buf;
}

/// |DFT(w x)|^2 for bins 0..N_fft/2, N_fft the next power of two >= frame length.
inline std::vector<double> power_spectrum(std::span<const double> frame,
                                          Window window = Window::Rectangular) {
  const std::size_t n_fft = next_pow2(std::max<std::size_t>(frame.size(), 2));
  const auto spec = windowed_spectrum(frame, window, n_fft);
  std::vector<double> power(n_fft / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(spec[k]);
  return power;
}

struct AutocorrPeak {
  double value = 0.0;
  std::size_t lag = 0;
};

/// Maximum of the normalized autocorrelation over [lag_min, lag_max].
///
/// Each lag is normalized by the energies of the two overlapping windows,
/// r(t) / sqrt(sum x[0..N-t)^2 * sum x[t..N)^2), which keeps values in [-1, 1]
/// and reads close to 1 for a periodic frame regardless of how many samples
/// overlap at that lag. A silent frame yields (0, lag_min).
inline AutocorrPeak autocorr_peak(std::span<const double> frame, std::size_t lag_min,
                                  std::size_t lag_max) {
  const std::size_t n = frame.size();
  if (lag_min < 1 || lag_max < lag_min || lag_max >= n)
    fail(ErrorCode::BadLagRange, "lag range [" + std::to_string(lag_min) + ", " +
                                     std::to_string(lag_max) + "] invalid for frame of " +
                                     std::to_string(n));
  // prefix[i] = sum_{j<i} x[j]^2
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + frame[i] * frame[i];
  AutocorrPeak best{0.0, lag_min};
  if (prefix[n] <= 0.0) return best;
  // Linear (not circular) autocorrelation via a 2N zero-padded transform.
  auto buf = windowed_spectrum(frame, Window::Rectangular, next_pow2(2 * n));
  for (auto& c : buf) c = {std::norm(c), 0.0};
  fft(buf, /*inverse=*/true);
  bool have = false;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    const double r = buf[lag].real();
    const double e_head = prefix[n - lag];
    const double e_tail = prefix[n] - prefix[lag];
    const double denom = std::sqrt(e_head * e_tail);
    // Overlaps carrying a negligible share of the frame energy score 0; the
    // transform's rounding noise would otherwise dominate the ratio.
    const double floor = 1e-6 * prefix[n];
    const double v =
        (e_head > floor && e_tail > floor) ? std::clamp(r / denom, -1.0, 1.0) : 0.0;
    if (!have || v > best.value) {
      best = {v, lag};
      have = true;
    }
  }
  return best;
}

/// Inverse DFT of log(|DFT(x)|^2 + 1e-10). Length is the next power of two
/// >= max(frame length, min_fft).
inline std::vector<double> real_cepstrum(std::span<const double> frame, std::size_t min_fft = 0,
                                         Window window = Window::Rectangular) {
  const std::size_t n_fft = next_pow2(std::max<std::size_t>({frame.size(), min_fft, 2}));
  auto spec = windowed_spectrum(frame, window, n_fft);
  for (auto& c : spec) c = {std::log(std::norm(c) + kLogFloor), 0.0};
  fft(spec, /*inverse=*/true);
  std::vector<double> out(n_fft);
  for (std::size_t i = 0; i < n_fft; ++i) out[i] = spec[i].real();
  return out;
}

}  // namespace emorec::dsp
