#include <catch_amalgamated.hpp>

#include "emorec/dsp.hpp"
#include "support/fixtures.hpp"

using namespace emorec;
using namespace emorec::dsp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("framing geometry") {
  auto f = frame_signal(fixtures::clip(std::vector<double>(4800, 0.1)));
  CHECK(f.frame_len() == 480);
  CHECK(f.hop() == 240);
  CHECK(f.size() == 19);
  // last frame starts at 4320 and is full; nothing padded beyond the clip here
  CHECK(f[18][479] == 0.1);

  f = frame_signal(fixtures::clip(std::vector<double>(4900, 0.1)));
  CHECK(f.size() == 20);
  CHECK(f[19][4900 - 19 * 240 - 1] == 0.1);
  CHECK(f[19][4900 - 19 * 240] == 0.0);

  CHECK(frame_signal(fixtures::clip(std::vector<double>(480, 0.0))).size() == 1);
  CHECK_THROWS_AS(frame_signal(fixtures::clip(std::vector<double>(100, 0.0))), Error);
}

TEST_CASE("frame i starts at sample i*hop") {
  std::vector<double> ramp(5000);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
  const auto f = frame_signal(fixtures::clip(ramp));
  std::vector<int> cover(ramp.size(), 0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.frame_len(); ++j) {
      const std::size_t s = i * f.hop() + j;
      if (s < ramp.size()) {
        CHECK(f[i][j] == ramp[s]);
        ++cover[s];
      }
    }
  // everything is seen twice except the first hop and the tail of the last frame
  for (std::size_t s = 0; s < ramp.size(); ++s)
    CHECK(cover[s] == (s < f.hop() || s >= f.size() * f.hop() ? 1 : 2));
}

TEST_CASE("short time energy") {
  CHECK(short_time_energy(std::vector<double>(480, 0.0)) == 0.0);
  CHECK_THAT(short_time_energy(std::vector<double>(480, 0.5)), WithinAbs(0.25, 1e-15));
  CHECK_THAT(short_time_energy(fixtures::sine(100, 480)), WithinAbs(0.5, 1e-6));
}

TEST_CASE("zero crossing rate") {
  std::vector<double> alt(480);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  CHECK(zero_crossing_rate(alt) == 1.0);
  CHECK(zero_crossing_rate(std::vector<double>(480, 0.3)) == 0.0);
  CHECK(zero_crossing_rate(std::vector<double>(480, 0.0)) == 0.0);
  // 100 Hz over 30 ms: 3 periods, 2 crossings each
  CHECK_THAT(zero_crossing_rate(fixtures::sine(100, 480, 1.0, 0.1)), WithinAbs(6.0 / 479.0, 1e-12));
  CHECK_THROWS_AS(zero_crossing_rate(std::vector<double>{1.0}), Error);
}

TEST_CASE("power spectrum") {
  auto p = power_spectrum(std::vector<double>(480, 0.0));
  CHECK(p.size() == 257);
  for (double v : p) CHECK(v == 0.0);

  p = power_spectrum(std::vector<double>(512, 1.0));
  CHECK_THAT(p[0], WithinRel(512.0 * 512.0, 1e-12));
  for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k] < 1e-12);

  p = power_spectrum(fixtures::sine(1000, 512));
  CHECK(std::max_element(p.begin(), p.end()) - p.begin() == 32);
}

TEST_CASE("fft matches a direct dft") {
  const auto x = fixtures::noise(64, 3, 1.0);
  const auto ref = fixtures::naive_dft(x);
  std::vector<std::complex<double>> a(x.begin(), x.end());
  fft(a);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(a[k] - ref[k]) < 1e-9);
  fft(a, true);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK_THAT(a[k].real(), WithinAbs(x[k], 1e-12));
}

TEST_CASE("parseval with the unnormalized forward transform") {
  // sum |X[k]|^2 over the full spectrum = N * sum x^2; rebuild it from the one-sided bins
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = fixtures::noise(512, seed, 1.0);
    const auto p = power_spectrum(x);
    double full = p.front() + p.back();
    for (std::size_t k = 1; k + 1 < p.size(); ++k) full += 2.0 * p[k];
    double energy = 0.0;
    for (double v : x) energy += v * v;
    CHECK_THAT(full, WithinRel(512.0 * energy, 1e-6));
  }
}

TEST_CASE("autocorrelation peak") {
  const auto z = autocorr_peak(std::vector<double>(480, 0.0), 40, 320);
  CHECK(z.value == 0.0);
  CHECK(z.lag == 40);

  const auto s = autocorr_peak(fixtures::sine(200, 480), 40, 320);
  CHECK(s.value > 0.9);
  CHECK(s.lag >= 79);
  CHECK(s.lag <= 81);

  CHECK(autocorr_peak(fixtures::noise(480, 7), 40, 320).value < 0.5);

  CHECK_THROWS_AS(autocorr_peak(std::vector<double>(480, 1.0), 0, 10), Error);
  CHECK_THROWS_AS(autocorr_peak(std::vector<double>(480, 1.0), 10, 480), Error);
  CHECK_THROWS_AS(autocorr_peak(std::vector<double>(480, 1.0), 20, 10), Error);
}

TEST_CASE("frame measures stay in range on random frames") {
  Rng rng(99);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> f(480);
    const double amp = rng.uniform(0.0, 1.0);
    for (auto& v : f) v = rng.uniform(-amp, amp) + (t % 3 == 0 ? rng.uniform(-0.5, 0.5) : 0.0);
    const double zcr = zero_crossing_rate(f);
    CHECK((zcr >= 0.0 && zcr <= 1.0));
    CHECK(short_time_energy(f) >= 0.0);
    const auto ac = autocorr_peak(f, 40, 320);
    CHECK((ac.value >= -1.0 && ac.value <= 1.0));
  }
}

TEST_CASE("real cepstrum") {
  auto c = real_cepstrum(std::vector<double>(480, 0.0));
  CHECK(c.size() == 512);
  CHECK_THAT(c[0], WithinAbs(std::log(1e-10), 1e-9));
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) < 1e-9);

  // pulse train with period 80 peaks at quefrency 80 within the pitch range
  c = real_cepstrum(fixtures::pulse_train(200, 480, 0.3), 1024);
  const auto best = std::max_element(c.begin() + 40, c.begin() + 320) - c.begin();
  CHECK(best == 80);

  const auto x = fixtures::noise(480, 4);
  std::vector<double> x2(x);
  for (auto& v : x2) v *= 2.0;
  const auto a = real_cepstrum(x), b = real_cepstrum(x2);
  CHECK_THAT(b[0] - a[0], WithinAbs(std::log(4.0), 1e-8));
  for (std::size_t i = 1; i < a.size(); ++i) CHECK_THAT(b[i], WithinAbs(a[i], 1e-8));
}
