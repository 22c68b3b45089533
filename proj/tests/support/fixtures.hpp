#pragma once

// Synthetic signals, datasets and brute-force oracles shared by the tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "emorec/audio_clip.hpp"
#include "emorec/dataset.hpp"
#include "emorec/random.hpp"
#include "emorec/segmentation.hpp"

namespace fixtures {

using emorec::AudioClip;
using emorec::Matrix;
using emorec::Rng;
using emorec::SegmentClass;

inline constexpr int kRate = 16000;

inline AudioClip clip(std::vector<double> samples, int rate = kRate, std::string id = "fixture") {
  return AudioClip{std::move(samples), rate, std::move(id)};
}

inline std::vector<double> sine(double hz, std::size_t n, double amp = 1.0, double phase = 0.0,
                                int rate = kRate) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate + phase);
  return x;
}

/// Unit pulses (height `amp`) at round(phase0*period + k*period).
inline std::vector<double> pulse_train(double f0, std::size_t n, double phase0 = 0.0,
                                       double amp = 0.9, int rate = kRate) {
  std::vector<double> x(n, 0.0);
  const double period = rate / f0;
  for (double t = phase0 * period; t < static_cast<double>(n); t += period) {
    const auto i = static_cast<std::size_t>(std::lround(t));
    if (i < n) x[i] = amp;
  }
  return x;
}

inline std::vector<double> sawtooth(double f0, std::size_t n, double phase0 = 0.0, double amp = 0.8,
                                    int rate = kRate) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = static_cast<double>(i) * f0 / rate + phase0;
    x[i] = amp * (2.0 * (p - std::floor(p)) - 1.0);
  }
  return x;
}

inline std::vector<double> noise(std::size_t n, std::uint64_t seed, double amp = 0.3) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-amp, amp);
  return x;
}

inline void append(std::vector<double>& dst, const std::vector<double>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

/// Concatenated silence / tone / noise pieces with the class of every sample.
struct LabeledSignal {
  std::vector<double> samples;
  std::vector<SegmentClass> truth;

  void add(const std::vector<double>& x, SegmentClass c) {
    append(samples, x);
    truth.insert(truth.end(), x.size(), c);
  }

  /// Majority ground-truth class of each analysis frame.
  std::vector<SegmentClass> frame_truth(std::size_t frames, std::size_t hop, std::size_t len) const {
    std::vector<SegmentClass> out(frames, SegmentClass::Pause);
    for (std::size_t f = 0; f < frames; ++f) {
      std::size_t counts[3] = {0, 0, 0};
      for (std::size_t i = f * hop; i < std::min(f * hop + len, truth.size()); ++i)
        ++counts[static_cast<int>(truth[i])];
      std::size_t best = 0;
      for (std::size_t c = 1; c < 3; ++c)
        if (counts[c] > counts[best]) best = c;
      out[f] = static_cast<SegmentClass>(best);
    }
    return out;
  }
};

/// Silence, tone, noise burst, tone, silence with seeded durations, pitch and levels.
inline LabeledSignal tone_noise_silence(std::uint64_t seed) {
  Rng rng(seed);
  const auto secs = [&](double lo, double hi) {
    return static_cast<std::size_t>(rng.uniform(lo, hi) * kRate);
  };
  LabeledSignal s;
  s.add(std::vector<double>(secs(0.15, 0.35), 0.0), SegmentClass::Pause);
  s.add(sine(rng.uniform(100.0, 300.0), secs(0.3, 0.6), rng.uniform(0.4, 0.8)), SegmentClass::Voiced);
  s.add(noise(secs(0.1, 0.3), rng.next(), rng.uniform(0.2, 0.4)), SegmentClass::Unvoiced);
  s.add(sine(rng.uniform(100.0, 300.0), secs(0.3, 0.6), rng.uniform(0.4, 0.8)), SegmentClass::Voiced);
  s.add(std::vector<double>(secs(0.15, 0.35), 0.0), SegmentClass::Pause);
  return s;
}

// Oracles

inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / n);
    out[k] = acc;
  }
  return out;
}

/// nPVI summed pair by pair from the definition.
inline double npvi_oracle(const std::vector<double>& d) {
  if (d.size() < 2) return 0.0;
  long double sum = 0.0L;
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b)
      if (b == a + 1) {
        const long double m = (static_cast<long double>(d[a]) + d[b]) / 2.0L;
        if (m > 0) sum += std::fabs(static_cast<long double>(d[a]) - d[b]) / m;
      }
  return static_cast<double>(100.0L * sum / static_cast<long double>(d.size() - 1));
}

/// Varco via the two-pass textbook formula in long double.
inline double varco_oracle(const std::vector<double>& d) {
  if (d.size() < 2) return 0.0;
  long double s = 0.0L, ss = 0.0L;
  for (double x : d) s += x;
  const long double mean = s / d.size();
  if (mean == 0) return 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / d.size()) * 100.0L / mean);
}

// Datasets

struct Labeled {
  Matrix x;
  std::vector<int> y;
};

/// k Gaussian blobs in `dims` dimensions, centers on a scaled simplex-like grid.
inline Labeled gaussian_blobs(int classes, std::size_t per_class, std::size_t dims, double sigma,
                              std::uint64_t seed) {
  Rng rng(seed);
  Labeled d;
  d.x = Matrix(0, dims);
  for (std::size_t i = 0; i < per_class; ++i)
    for (int c = 0; c < classes; ++c) {
      std::vector<double> row(dims);
      for (std::size_t j = 0; j < dims; ++j)
        row[j] = (j % static_cast<std::size_t>(classes) == static_cast<std::size_t>(c) ? 1.0 : 0.0) +
                 sigma * rng.gaussian();
      d.x.append_row(row);
      d.y.push_back(c);
    }
  return d;
}

inline Labeled xor_data() {
  Labeled d;
  for (auto r : std::vector<std::vector<double>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}) d.x.append_row(r);
  d.y = {0, 1, 1, 0};
  return d;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("emorec_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
