#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "emorec/error.hpp"

namespace emorec {

/// Mono PCM signal normalized to [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

inline void validate(const AudioClip& clip) {
  if (clip.sample_rate <= 0) fail(ErrorCode::MalformedWav, "sample rate must be positive");
  if (clip.samples.empty()) fail(ErrorCode::MalformedWav, "clip has no samples");
  for (double s : clip.samples) {
    if (!std::isfinite(s) || std::abs(s) > 1.0)
      fail(ErrorCode::MalformedWav, "sample outside [-1, 1] in " + clip.source_id);
  }
}

}  // namespace emorec
