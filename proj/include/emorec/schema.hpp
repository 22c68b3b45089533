#pragma once

// The fixed 487-name feature layout. Names follow
// <family>_<stat>_<deriv>[_<index>]_<segment>, e.g. mfcc_max_org_1_voiced.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emorec/error.hpp"

namespace emorec {

inline constexpr std::size_t kNumMfcc = 17;
inline constexpr std::size_t kNumStats = 4;
inline constexpr std::size_t kNumDerivs = 3;
inline constexpr std::size_t kContourBlock = kNumStats * kNumDerivs;  // 12

inline constexpr std::size_t kMfccPerSegment = kNumMfcc * kContourBlock;  // 204
inline constexpr std::size_t kLoudnessPerSegment = kContourBlock;          // 12
inline constexpr std::size_t kPitchFeatures = kContourBlock;               // 12
inline constexpr std::size_t kEnergyFeatures = 2 * kContourBlock;          // 24
inline constexpr std::size_t kRhythmFeatures = 13;
inline constexpr std::size_t kTemporalFeatures = 6;
inline constexpr std::size_t kRhythmTemporalFeatures = kRhythmFeatures + kTemporalFeatures;

inline constexpr std::size_t kNumFeatures = 2 * kMfccPerSegment + 2 * kLoudnessPerSegment +
                                            kPitchFeatures + kEnergyFeatures +
                                            kRhythmTemporalFeatures;
static_assert(kMfccPerSegment == 204);
static_assert(kRhythmTemporalFeatures == 19);
static_assert(kNumFeatures == 487);

inline constexpr std::array<std::string_view, kNumStats> kStatNames = {"mean", "std", "min", "max"};
inline constexpr std::array<std::string_view, kNumDerivs> kDerivNames = {"org", "d1", "d2"};

inline constexpr std::array<std::string_view, kRhythmFeatures> kRhythmNames = {
    "rhythm_mean_voiced",  "rhythm_mean_unvoiced",  "rhythm_mean_pause",
    "rhythm_std_voiced",   "rhythm_std_unvoiced",   "rhythm_std_pause",
    "rhythm_varco_voiced", "rhythm_varco_unvoiced", "rhythm_varco_pause",
    "rhythm_npvi_voiced",  "rhythm_npvi_unvoiced",  "rhythm_npvi_pause",
    "rhythm_rate_voiced",
};

inline constexpr std::array<std::string_view, kTemporalFeatures> kTemporalNames = {
    "temporal_pause_to_speech",   "temporal_voiced_to_unvoiced",
    "temporal_unvoiced_to_speech", "temporal_voiced_to_speech",
    "temporal_voiced_to_pause",   "temporal_unvoiced_to_pause",
};

/// Feature families, in schema order. Table-style counts: 204/204/12/12/12/24/19.
enum class Family {
  MfccVoiced,
  MfccUnvoiced,
  LoudnessVoiced,
  LoudnessUnvoiced,
  Pitch,
  Energy,
  RhythmTemporal,
};

inline constexpr std::array<Family, 7> kFamilies = {
    Family::MfccVoiced, Family::MfccUnvoiced, Family::LoudnessVoiced, Family::LoudnessUnvoiced,
    Family::Pitch,      Family::Energy,       Family::RhythmTemporal,
};

constexpr std::string_view family_name(Family f) {
  switch (f) {
    case Family::MfccVoiced: return "mfcc_voiced";
    case Family::MfccUnvoiced: return "mfcc_unvoiced";
    case Family::LoudnessVoiced: return "loudness_voiced";
    case Family::LoudnessUnvoiced: return "loudness_unvoiced";
    case Family::Pitch: return "pitch";
    case Family::Energy: return "energy";
    case Family::RhythmTemporal: return "rhythm";
  }
  return "?";
}

constexpr std::size_t family_size(Family f) {
  switch (f) {
    case Family::MfccVoiced:
    case Family::MfccUnvoiced: return kMfccPerSegment;
    case Family::LoudnessVoiced:
    case Family::LoudnessUnvoiced: return kLoudnessPerSegment;
    case Family::Pitch: return kPitchFeatures;
    case Family::Energy: return kEnergyFeatures;
    case Family::RhythmTemporal: return kRhythmTemporalFeatures;
  }
  return 0;
}

class FeatureSchema {
 public:
  FeatureSchema() {
    const auto contour = [this](std::string_view family, std::string_view suffix, Family fam) {
      for (auto deriv : kDerivNames)
        for (auto stat : kStatNames)
          add(std::string(family) + "_" + std::string(stat) + "_" + std::string(deriv) +
                  std::string(suffix),
              fam);
    };
    const std::array<std::string_view, 2> segments = {"voiced", "unvoiced"};
    for (std::size_t s = 0; s < 2; ++s) {
      const Family fam = s == 0 ? Family::MfccVoiced : Family::MfccUnvoiced;
      for (std::size_t c = 1; c <= kNumMfcc; ++c)
        contour("mfcc", "_" + std::to_string(c) + "_" + std::string(segments[s]), fam);
    }
    contour("loudness", "_voiced", Family::LoudnessVoiced);
    contour("loudness", "_unvoiced", Family::LoudnessUnvoiced);
    contour("pitch", "_voiced", Family::Pitch);
    contour("energy", "_voiced", Family::Energy);
    contour("energy", "_unvoiced", Family::Energy);
    for (auto n : kRhythmNames) add(std::string(n), Family::RhythmTemporal);
    for (auto n : kTemporalNames) add(std::string(n), Family::RhythmTemporal);

    if (names_.size() != kNumFeatures || index_.size() != kNumFeatures)
      fail(ErrorCode::SchemaViolation, "schema does not have 487 unique names");
    for (Family f : kFamilies)
      if (indices_of(f).size() != family_size(f))
        fail(ErrorCode::SchemaViolation, "family count mismatch for " + std::string(family_name(f)));
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  Family family(std::size_t i) const { return families_.at(i); }

  /// Index of a feature name, or size() when absent.
  std::size_t find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? names_.size() : it->second;
  }

  std::size_t index_of(std::string_view name) const {
    const std::size_t i = find(name);
    if (i == names_.size()) fail(ErrorCode::SchemaViolation, "unknown feature " + std::string(name));
    return i;
  }

  std::vector<std::size_t> indices_of(Family f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < families_.size(); ++i)
      if (families_[i] == f) out.push_back(i);
    return out;
  }

 private:
  void add(std::string name, Family f) {
    index_.emplace(name, names_.size());
    names_.push_back(std::move(name));
    families_.push_back(f);
  }

  std::vector<std::string> names_;
  std::vector<Family> families_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline const FeatureSchema& feature_schema() {
  static const FeatureSchema schema;
  return schema;
}

}  // namespace emorec
