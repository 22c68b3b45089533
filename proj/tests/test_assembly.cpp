#include <catch_amalgamated.hpp>

#include <set>

#include "emorec/features.hpp"
#include "support/fixtures.hpp"

using namespace emorec;
using Catch::Matchers::WithinAbs;

namespace {

AudioClip speechlike(std::uint64_t seed) {
  return fixtures::clip(fixtures::tone_noise_silence(seed).samples);
}

}  // namespace

TEST_CASE("schema layout") {
  const auto& s = feature_schema();
  CHECK(s.size() == 487);
  CHECK(std::set<std::string>(s.names().begin(), s.names().end()).size() == 487);
  const std::array<std::size_t, 7> counts{204, 204, 12, 12, 12, 24, 19};
  std::size_t total = 0;
  for (std::size_t i = 0; i < kFamilies.size(); ++i) {
    CHECK(s.indices_of(kFamilies[i]).size() == counts[i]);
    total += counts[i];
  }
  CHECK(total == 487);
  CHECK(s.name(0) == "mfcc_mean_org_1_voiced");
  CHECK(s.find("mfcc_max_org_1_voiced") < s.size());
  CHECK(s.find("pitch_min_org_voiced") < s.size());
  CHECK(s.find("rhythm_mean_voiced") < s.size());
  CHECK(s.find("mfcc_std_d2_17_unvoiced") < s.size());
  CHECK(s.find("pitch_mean_org_unvoiced") == s.size());
  CHECK_THROWS_AS(s.index_of("nope"), Error);
  CHECK(s.name(486) == "temporal_unvoiced_to_pause");
}

TEST_CASE("contour statistics") {
  auto st = contour_stats(std::vector{1.0, 2.0, 3.0});
  CHECK(st.mean == 2.0);
  CHECK_THAT(st.std, WithinAbs(0.8165, 1e-4));
  CHECK(st.min == 1.0);
  CHECK(st.max == 3.0);
  CHECK_FALSE(st.degenerate);

  st = contour_stats(std::vector<double>{});
  CHECK((st.mean == 0 && st.std == 0 && st.min == 0 && st.max == 0));
  CHECK(st.degenerate);

  st = contour_stats(std::vector{5.0, 5.0});
  CHECK((st.mean == 5 && st.std == 0 && st.min == 5 && st.max == 5));
}

TEST_CASE("contour derivatives") {
  CHECK(derivative(std::vector{3.0, 3.0, 3.0, 3.0}) == std::vector{0.0, 0.0, 0.0, 0.0});
  CHECK(derivative(std::vector{0.0, 1.0, 2.0, 3.0}) == std::vector{0.5, 1.0, 1.0, 0.5});
  const auto d2 = derivative(std::vector{0.0, 2.0, 4.0, 6.0, 8.0, 10.0}, 2);
  for (std::size_t t = 2; t + 2 < d2.size(); ++t) CHECK(d2[t] == 0.0);
  CHECK(derivative(std::vector{1.0, 9.0}) == std::vector{0.0, 0.0});
  CHECK_THROWS_AS(derivative(std::vector{1.0}, 3), Error);
}

TEST_CASE("assembled vector") {
  const auto fv = extract_features(speechlike(3));
  REQUIRE(fv.values.size() == 487);
  for (double v : fv.values) CHECK(std::isfinite(v));

  const auto& s = feature_schema();
  // contour blocks end where the rhythm values start
  for (std::size_t i = 0; i < s.index_of("rhythm_mean_voiced"); i += 4) {
    INFO(s.name(i));
    CHECK(fv.values[i + 2] <= fv.values[i] + 1e-12);
    CHECK(fv.values[i] <= fv.values[i + 3] + 1e-12);
    CHECK(fv.values[i + 1] >= 0.0);
  }

  const auto again = extract_features(speechlike(3));
  CHECK(again.values == fv.values);
}

TEST_CASE("mfcc statistics equal a per-frame oracle") {
  const auto clip = speechlike(6);
  const auto a = analyze_utterance(clip);
  const MfccAnalyzer mfcc(MfccConfig{}, a.frames.frame_len(), clip.sample_rate);
  std::vector<std::vector<double>> per_coeff(kNumMfcc);
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    if (a.segmentation.frame_labels[i] != SegmentClass::Voiced) continue;
    const auto c = mfcc.compute(a.frames[i]);
    for (std::size_t k = 0; k < kNumMfcc; ++k) per_coeff[k].push_back(c[k]);
  }
  REQUIRE(per_coeff[0].size() > 10);
  const auto fv = assemble(a.contours, a.rhythm, a.ratios);
  const auto& s = feature_schema();
  for (std::size_t k = 0; k < kNumMfcc; ++k) {
    const auto& v = per_coeff[k];
    long double sum = 0;
    for (double x : v) sum += x;
    const double mean = static_cast<double>(sum / v.size());
    long double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const auto tag = "_org_" + std::to_string(k + 1) + "_voiced";
    CHECK_THAT(fv.values[s.index_of("mfcc_mean" + tag)], WithinAbs(mean, 1e-12));
    CHECK_THAT(fv.values[s.index_of("mfcc_std" + tag)],
               WithinAbs(static_cast<double>(std::sqrt(ss / v.size())), 1e-12));
    CHECK(fv.values[s.index_of("mfcc_min" + tag)] == *std::min_element(v.begin(), v.end()));
    CHECK(fv.values[s.index_of("mfcc_max" + tag)] == *std::max_element(v.begin(), v.end()));
  }
}

TEST_CASE("all-pause utterance") {
  const auto fv = extract_features(fixtures::clip(std::vector<double>(8000, 0.0)));
  REQUIRE(fv.values.size() == 487);
  const auto& s = feature_schema();
  for (std::size_t i = 0; i < 468; ++i) CHECK(fv.values[i] == 0.0);
  CHECK(fv.values[s.index_of("rhythm_mean_pause")] == 0.5);
  CHECK(fv.values[s.index_of("rhythm_rate_voiced")] == 0.0);
  CHECK(fv.values[s.index_of("temporal_pause_to_speech")] == 0.0);
  const std::set<std::string> flagged(fv.degenerate.begin(), fv.degenerate.end());
  CHECK(flagged.count("mfcc_mean_org_1_voiced") == 1);
  CHECK(flagged.count("temporal_pause_to_speech") == 1);
  CHECK(flagged.count("temporal_voiced_to_pause") == 0);
}

TEST_CASE("extraction rejects a non-schema mfcc count") {
  ExtractionConfig cfg;
  cfg.mfcc.n_coeffs = 13;
  CHECK_THROWS_AS(extract_features(speechlike(1), cfg), Error);
}
