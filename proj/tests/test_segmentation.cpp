#include <catch_amalgamated.hpp>

#include "emorec/segmentation.hpp"
#include "support/fixtures.hpp"

using namespace emorec;
using fixtures::kRate;

namespace {

constexpr bool A = true, I = false;

// 480 + 32 * 240: frames tile the clip with no zero-padded tail
constexpr std::size_t kExact = 8160;

std::vector<double> concat(std::initializer_list<std::vector<double>> parts) {
  std::vector<double> out;
  for (const auto& p : parts) fixtures::append(out, p);
  return out;
}

std::vector<double> zeros(double seconds) {
  return std::vector<double>(static_cast<std::size_t>(seconds * kRate), 0.0);
}

void check_partition(const Segmentation& seg) {
  REQUIRE_FALSE(seg.intervals.empty());
  CHECK(seg.intervals.front().start_sample == 0);
  CHECK(seg.intervals.back().end_sample == seg.num_samples);
  for (std::size_t i = 0; i < seg.intervals.size(); ++i) {
    CHECK(seg.intervals[i].end_sample > seg.intervals[i].start_sample);
    if (i > 0) {
      CHECK(seg.intervals[i].start_sample == seg.intervals[i - 1].end_sample);
      CHECK(seg.intervals[i].cls != seg.intervals[i - 1].cls);
    }
  }
}

}  // namespace

TEST_CASE("activity detection") {
  VadConfig cfg;
  auto frames = dsp::frame_signal(fixtures::clip(zeros(0.5)));
  for (bool f : detect_activity(frames, cfg)) CHECK_FALSE(f);

  frames = dsp::frame_signal(fixtures::clip(fixtures::sine(200, kExact)));
  for (bool f : detect_activity(frames, cfg)) CHECK(f);

  frames = dsp::frame_signal(fixtures::clip(concat({zeros(0.3), fixtures::sine(200, 4800), zeros(0.3)})));
  const auto active = detect_activity(frames, cfg);
  const auto first = std::find(active.begin(), active.end(), true) - active.begin();
  const auto last = active.rend() - std::find(active.rbegin(), active.rend(), true) - 1;
  const double hop_s = static_cast<double>(frames.hop()) / kRate;
  const double frame_s = static_cast<double>(frames.frame_len()) / kRate;
  CHECK(std::abs(first * hop_s - 0.3) <= frame_s);
  CHECK(std::abs((last + 1) * hop_s - 0.6) <= frame_s);
  for (auto i = first; i <= last; ++i) CHECK(active[i]);
}

TEST_CASE("activity smoothing") {
  CHECK(smooth_activity({A, I, A, A, A}, 2) == ActivityFlags{A, A, A, A, A});
  CHECK(smooth_activity({I, I, A, I, I}, 2) == ActivityFlags(5, I));
  const ActivityFlags smooth{I, I, A, A, A, I, I, A, A};
  CHECK(smooth_activity(smooth, 2) == smooth);

  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    ActivityFlags f(40);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform() < 0.5;
    const int run = 1 + static_cast<int>(rng.below(4));
    const auto once = smooth_activity(f, run);
    CHECK(smooth_activity(once, run) == once);
  }
}

TEST_CASE("zcr endpoint extension") {
  VadConfig cfg;
  const ActivityFlags flags{I, I, I, A, A, I, I, I};
  const std::vector<double> high{0.1, 0.5, 0.6, 0.0, 0.0, 0.4, 0.1, 0.9};
  CHECK(extend_endpoints_zcr(flags, high, cfg) == ActivityFlags{I, A, A, A, A, A, I, I});

  const std::vector<double> low(8, 0.05);
  CHECK(extend_endpoints_zcr(flags, low, cfg) == flags);

  const ActivityFlags edge{A, A, I, I};
  CHECK(extend_endpoints_zcr(edge, std::vector<double>(4, 0.9), cfg) == ActivityFlags(4, A));

  cfg.max_extension_frames = 1;
  CHECK(extend_endpoints_zcr(flags, std::vector<double>(8, 0.9), cfg) ==
        ActivityFlags{I, I, A, A, A, A, I, I});
  CHECK_THROWS_AS(extend_endpoints_zcr(flags, std::vector<double>(3), cfg), Error);
}

TEST_CASE("extension absorbs a fricative onset") {
  // a noise burst far quieter than the vowel misses the energy thresholds but
  // is pulled in by its high zero-crossing rate
  const auto x = concat({zeros(0.2), fixtures::noise(2400, 8, 0.02), fixtures::sine(150, 4800, 0.8),
                         zeros(0.2)});
  VadConfig cfg;
  const auto frames = dsp::frame_signal(fixtures::clip(x));
  const auto a = analyze_frames(frames, cfg);
  const auto base = smooth_activity(detect_activity(a.energy, cfg), cfg.min_run_frames);
  const auto grown = extend_endpoints_zcr(base, a.zcr, cfg);
  const std::size_t burst_mid = (static_cast<std::size_t>(0.2 * kRate) + 1200) / frames.hop();
  CHECK_FALSE(base[burst_mid]);
  CHECK(grown[burst_mid]);
}

TEST_CASE("frame labels") {
  VadConfig cfg;
  SECTION("tone is voiced") {
    const auto seg = segment(fixtures::clip(fixtures::sine(200, kExact, 0.5)), cfg);
    CHECK(seg.count(SegmentClass::Voiced) == seg.frame_labels.size());
  }
  SECTION("noise burst is unvoiced") {
    const auto seg = segment(fixtures::clip(fixtures::noise(kExact, 21)), cfg);
    CHECK(seg.count(SegmentClass::Unvoiced) == seg.frame_labels.size());
  }
  SECTION("silence is pause") {
    const auto seg = segment(fixtures::clip(zeros(0.5)), cfg);
    CHECK(seg.count(SegmentClass::Pause) == seg.frame_labels.size());
    REQUIRE(seg.intervals.size() == 1);
    CHECK(seg.duration(seg.intervals[0]) == 0.5);
  }
  SECTION("active frames that are neither voiced nor fricative are pauses") {
    FrameAnalysis a{{1, 1, 1}, {0.1, 0.1, 0.5}, {0.9, 0.1, 0.1}};
    const auto labels = label_frames(a, {A, A, I}, cfg);
    CHECK(labels == std::vector{SegmentClass::Voiced, SegmentClass::Pause, SegmentClass::Pause});
  }
}

TEST_CASE("median filter removes isolated flips") {
  using enum SegmentClass;
  CHECK(median_filter_labels({Voiced, Pause, Voiced, Voiced}) ==
        std::vector{Voiced, Voiced, Voiced, Voiced});
  CHECK(median_filter_labels({Pause, Voiced, Unvoiced}) == std::vector{Pause, Voiced, Unvoiced});
}

TEST_CASE("intervals partition the clip") {
  using enum SegmentClass;
  const auto seg = build_segmentation({Pause, Voiced, Voiced, Unvoiced, Pause}, 240, 480, 1500, kRate);
  check_partition(seg);
  REQUIRE(seg.intervals.size() == 4);
  CHECK(seg.intervals[1].start_sample == 240);
  CHECK(seg.intervals[1].end_sample == 720);
  CHECK(seg.intervals[3].end_sample == 1500);

  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto sig = fixtures::tone_noise_silence(s);
    const auto g = segment(fixtures::clip(sig.samples));
    check_partition(g);
    std::size_t covered = 0;
    for (const auto& iv : g.intervals) covered += iv.end_sample - iv.start_sample;
    CHECK(covered == sig.samples.size());
  }
}

TEST_CASE("segmentation agrees with constructed fixtures") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto sig = fixtures::tone_noise_silence(s);
    const auto clip = fixtures::clip(sig.samples);
    const auto frames = dsp::frame_signal(clip);
    const auto seg = segment(clip);
    const auto truth = sig.frame_truth(frames.size(), frames.hop(), frames.frame_len());
    std::size_t agree = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) agree += truth[i] == seg.frame_labels[i];
    INFO("seed " << s);
    CHECK(static_cast<double>(agree) / static_cast<double>(truth.size()) >= 0.9);
  }
}

TEST_CASE("vad config validation") {
  VadConfig c;
  c.energy_low_frac = 0.2;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.min_run_frames = 0;
  CHECK_THROWS_AS(validate(c), Error);
  CHECK_NOTHROW(validate(VadConfig{}));
}
