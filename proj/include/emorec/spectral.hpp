#pragma once

// Bark-scale filter bank with total loudness, and mel-frequency cepstral
// coefficients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "emorec/dsp.hpp"
#include "emorec/error.hpp"

namespace emorec {

// ---------------------------------------------------------------------------
// Bark scale and loudness

/// Hz to bark: 6 asinh(f / 600), i.e. 6 ln(f/600 + sqrt((f/600)^2 + 1)).
inline double bark_scale(double hz) {
  if (hz < 0.0) fail(ErrorCode::NegativeFrequency, "negative frequency " + std::to_string(hz));
  return 6.0 * std::asinh(hz / 600.0);
}

inline double bark_to_hz(double bark) { return 600.0 * std::sinh(bark / 6.0); }

inline constexpr double kSpecificLoudnessExponent = 0.23;

struct BarkFilterBank {
  std::vector<double> centers_bark;
  std::vector<double> centers_hz;
  double lower_slope = 1.0;  // decades per bark below the flat top
  double upper_slope = 2.5;  // decades per bark above the flat top
  double fmin = 0.0;
  double fmax = 0.0;

  std::size_t size() const { return centers_bark.size(); }
};

/// Centers at spacing, 2*spacing, ... bark, restricted to [bark(fmin), bark(fmax)].
inline BarkFilterBank build_bark_bank(double fmin, double fmax, double spacing_bark = 1.0,
                                      double lower_slope = 1.0, double upper_slope = 2.5) {
  if (!(fmin >= 0.0 && fmin < fmax))
    fail(ErrorCode::BadRange, "bark bank needs 0 <= fmin < fmax");
  if (!(spacing_bark > 0.0)) fail(ErrorCode::BadRange, "bark spacing must be positive");
  if (!(lower_slope > 0.0 && upper_slope > 0.0))
    fail(ErrorCode::BadRange, "bark filter slopes must be positive");
  BarkFilterBank bank;
  bank.lower_slope = lower_slope;
  bank.upper_slope = upper_slope;
  bank.fmin = fmin;
  bank.fmax = fmax;
  const double lo = bark_scale(fmin);
  const double hi = bark_scale(fmax);
  for (int k = 1;; ++k) {
    const double omega = spacing_bark * k;
    if (omega > hi + 1e-12) break;
    if (omega + 1e-12 < lo) continue;
    bank.centers_bark.push_back(omega);
    bank.centers_hz.push_back(bark_to_hz(omega));
  }
  if (bank.centers_bark.empty())
    fail(ErrorCode::BadRange, "no bark filter center fits in [fmin, fmax]");
  return bank;
}

/// Weight of the filter centered at `center` (bark) at `omega` (bark): flat 1
/// within half a bark of the center, decaying as 10^(slope * distance past the
/// knee) on either side, and exactly 0 beyond 4 bark.
inline double bark_filter_weight(double omega, double center, double lower_slope = 1.0,
                                 double upper_slope = 2.5) {
  const double d = omega - center;
  if (std::abs(d) > 4.0) return 0.0;
  if (d <= -0.5) return std::pow(10.0, lower_slope * (d + 0.5));
  if (d >= 0.5) return std::pow(10.0, -upper_slope * (d - 0.5));
  return 1.0;
}

/// Bank weights sampled at the bins of a one-sided power spectrum. Immutable
/// after construction; share freely across threads.
class LoudnessAnalyzer {
 public:
  LoudnessAnalyzer(BarkFilterBank bank, std::size_t n_bins, int sample_rate)
      : bank_(std::move(bank)), n_bins_(n_bins) {
    if (n_bins < 2) fail(ErrorCode::BadRange, "spectrum needs at least two bins");
    if (bank_.fmax > sample_rate / 2.0 + 1e-9)
      fail(ErrorCode::BadRange, "bark bank fmax exceeds the Nyquist frequency");
    const double n_fft = 2.0 * static_cast<double>(n_bins - 1);
    bins_.resize(bank_.size());
    for (std::size_t k = 0; k < bank_.size(); ++k) {
      for (std::size_t b = 0; b < n_bins; ++b) {
        const double hz = static_cast<double>(b) * sample_rate / n_fft;
        if (hz < bank_.fmin || hz > bank_.fmax) continue;
        const double w = bark_filter_weight(bark_scale(hz), bank_.centers_bark[k],
                                            bank_.lower_slope, bank_.upper_slope);
        if (w > 0.0) bins_[k].push_back({b, w});
      }
    }
  }

  const BarkFilterBank& bank() const { return bank_; }
  std::size_t n_bins() const { return n_bins_; }

  std::vector<double> band_energies(std::span<const double> power) const {
    if (power.size() != n_bins_)
      fail(ErrorCode::DimensionMismatch, "spectrum size does not match the analyzer");
    std::vector<double> e(bank_.size(), 0.0);
    for (std::size_t k = 0; k < bins_.size(); ++k)
      for (const auto& [b, w] : bins_[k]) e[k] += w * power[b];
    return e;
  }

  /// Sum over bands of E_k^0.23.
  double total_loudness(std::span<const double> power) const {
    double n = 0.0;
    for (double e : band_energies(power)) n += std::pow(e, kSpecificLoudnessExponent);
    return n;
  }

 private:
  struct Tap {
    std::size_t bin;
    double weight;
  };
  BarkFilterBank bank_;
  std::size_t n_bins_;
  std::vector<std::vector<Tap>> bins_;
};

inline double total_loudness(std::span<const double> power, const BarkFilterBank& bank,
                             int sample_rate) {
  return LoudnessAnalyzer(bank, power.size(), sample_rate).total_loudness(power);
}

// ---------------------------------------------------------------------------
// MFCC

struct MfccConfig {
  std::size_t n_coeffs = 17;
  std::size_t n_mel_filters = 26;
  double pre_emphasis = 0.97;
  dsp::Window window = dsp::Window::Hamming;
  double fmin = 0.0;
  double fmax = 0.0;  // 0 selects the Nyquist frequency
};

inline void validate(const MfccConfig& c) {
  if (c.n_coeffs == 0 || c.n_coeffs >= c.n_mel_filters)
    fail(ErrorCode::InvalidConfig, "mfcc: need 1 <= n_coeffs < n_mel_filters (c0 is dropped)");
  if (!(c.pre_emphasis >= 0.0 && c.pre_emphasis < 1.0))
    fail(ErrorCode::InvalidConfig, "mfcc: pre_emphasis must be in [0, 1)");
  if (c.fmin < 0.0 || (c.fmax != 0.0 && c.fmax <= c.fmin))
    fail(ErrorCode::InvalidConfig, "mfcc: invalid frequency range");
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Orthonormal DCT-II.
inline std::vector<double> dct_ii(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += x[i] * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) *
                             static_cast<double>(k) / static_cast<double>(n));
    out[k] = acc * std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
  }
  return out;
}

/// Inverse of dct_ii (orthonormal DCT-III).
inline std::vector<double> idct_ii(std::span<const double> c) {
  const std::size_t n = c.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      acc += c[k] * std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n)) *
             std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) * static_cast<double>(k) /
                      static_cast<double>(n));
    out[i] = acc;
  }
  return out;
}

/// Per-frame MFCC computation for a fixed frame length and sample rate.
/// Pre-emphasis, window, power spectrum, triangular mel bank, log, DCT-II;
/// returns c1..c_n (c0 excluded).
class MfccAnalyzer {
 public:
  MfccAnalyzer(MfccConfig cfg, std::size_t frame_len, int sample_rate)
      : cfg_(cfg), frame_len_(frame_len), n_fft_(dsp::next_pow2(std::max<std::size_t>(frame_len, 2))) {
    validate(cfg_);
    const double nyquist = sample_rate / 2.0;
    const double fmax = cfg_.fmax == 0.0 ? nyquist : std::min(cfg_.fmax, nyquist);
    if (cfg_.fmin >= fmax) fail(ErrorCode::InvalidConfig, "mfcc: fmin at or above fmax");
    const std::size_t m = cfg_.n_mel_filters;
    const double mel_lo = hz_to_mel(cfg_.fmin), mel_hi = hz_to_mel(fmax);
    std::vector<double> edges(m + 2);
    for (std::size_t i = 0; i < m + 2; ++i)
      edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(m + 1));
    const std::size_t n_bins = n_fft_ / 2 + 1;
    filters_.assign(m, std::vector<double>(n_bins, 0.0));
    for (std::size_t f = 0; f < m; ++f) {
      const double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
      for (std::size_t b = 0; b < n_bins; ++b) {
        const double hz = static_cast<double>(b) * sample_rate / static_cast<double>(n_fft_);
        if (hz > lo && hz < mid)
          filters_[f][b] = (hz - lo) / (mid - lo);
        else if (hz >= mid && hz < hi)
          filters_[f][b] = (hi - hz) / (hi - mid);
      }
    }
    // DCT-II basis rows 1..n_coeffs of the orthonormal transform.
    basis_.assign(cfg_.n_coeffs, std::vector<double>(m, 0.0));
    for (std::size_t k = 1; k <= cfg_.n_coeffs; ++k)
      for (std::size_t i = 0; i < m; ++i)
        basis_[k - 1][i] = std::sqrt(2.0 / static_cast<double>(m)) *
                           std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) *
                                    static_cast<double>(k) / static_cast<double>(m));
  }

  const MfccConfig& config() const { return cfg_; }

  /// log(E + 1e-10) per mel filter.
  std::vector<double> log_mel(std::span<const double> frame) const {
    if (frame.size() != frame_len_)
      fail(ErrorCode::DimensionMismatch, "frame length does not match the MFCC analyzer");
    std::vector<double> emph(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i)
      emph[i] = frame[i] - (i > 0 ? cfg_.pre_emphasis * frame[i - 1] : 0.0);
    const auto power = dsp::power_spectrum(emph, cfg_.window);
    std::vector<double> out(filters_.size());
    for (std::size_t f = 0; f < filters_.size(); ++f) {
      double e = 0.0;
      for (std::size_t b = 0; b < power.size(); ++b) e += filters_[f][b] * power[b];
      out[f] = std::log(e + dsp::kLogFloor);
    }
    return out;
  }

  std::vector<double> compute(std::span<const double> frame) const {
    const auto lm = log_mel(frame);
    std::vector<double> c(basis_.size(), 0.0);
    for (std::size_t k = 0; k < basis_.size(); ++k)
      for (std::size_t i = 0; i < lm.size(); ++i) c[k] += basis_[k][i] * lm[i];
    return c;
  }

 private:
  MfccConfig cfg_;
  std::size_t frame_len_;
  std::size_t n_fft_;
  std::vector<std::vector<double>> filters_;
  std::vector<std::vector<double>> basis_;
};

inline std::vector<double> mfcc_frame(std::span<const double> frame, int sample_rate,
                                      const MfccConfig& cfg = {}) {
  return MfccAnalyzer(cfg, frame.size(), sample_rate).compute(frame);
}

}  // namespace emorec
