#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "emorec/error.hpp"

namespace emorec {

/// Class labels carried by datasets. The first seven are the EMO-DB emotions;
/// the arousal pair only appears after relabeling. Enum order is the class
/// order used for tie-breaking everywhere.
enum class Label : int {
  Anger = 0,
  Boredom,
  Disgust,
  Fear,
  Happiness,
  Sadness,
  Neutral,
  HighArousal,
  LowArousal,
};

inline constexpr int kNumLabels = 9;
inline constexpr int kNumEmotions = 7;

inline constexpr std::array<Label, kNumEmotions> kEmotions = {
    Label::Anger,     Label::Boredom, Label::Disgust, Label::Fear,
    Label::Happiness, Label::Sadness, Label::Neutral,
};

constexpr bool is_emotion(Label l) { return static_cast<int>(l) < kNumEmotions; }

constexpr std::string_view label_name(Label l) {
  switch (l) {
    case Label::Anger: return "anger";
    case Label::Boredom: return "boredom";
    case Label::Disgust: return "disgust";
    case Label::Fear: return "fear";
    case Label::Happiness: return "happiness";
    case Label::Sadness: return "sadness";
    case Label::Neutral: return "neutral";
    case Label::HighArousal: return "high_arousal";
    case Label::LowArousal: return "low_arousal";
  }
  return "?";
}

inline std::optional<Label> parse_label(std::string_view name) {
  for (int i = 0; i < kNumLabels; ++i) {
    const auto l = static_cast<Label>(i);
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

inline Label label_from_name(std::string_view name) {
  if (auto l = parse_label(name)) return *l;
  fail(ErrorCode::UnknownClass, "unknown class label '" + std::string(name) + "'");
}

/// German code letters used in EMO-DB file names (Wut, Langeweile, Ekel,
/// Angst, Freude, Trauer, Neutral).
constexpr char emodb_code(Label l) {
  switch (l) {
    case Label::Anger: return 'W';
    case Label::Boredom: return 'L';
    case Label::Disgust: return 'E';
    case Label::Fear: return 'A';
    case Label::Happiness: return 'F';
    case Label::Sadness: return 'T';
    case Label::Neutral: return 'N';
    default: return '?';
  }
}

inline std::optional<Label> emotion_from_code(char code) {
  for (Label l : kEmotions)
    if (emodb_code(l) == code) return l;
  return std::nullopt;
}

constexpr bool is_high_arousal(Label l) {
  return l == Label::Happiness || l == Label::Anger || l == Label::Fear;
}

}  // namespace emorec
