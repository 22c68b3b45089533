#pragma once

// Flat key=value pipeline configuration. Every field has a dotted key; files
// hold one `key=value` per line, `#` starts a comment.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "emorec/classifier.hpp"
#include "emorec/error.hpp"
#include "emorec/evaluation.hpp"
#include "emorec/features.hpp"

namespace emorec {

struct SelectionSettings {
  SelectionMode mode = SelectionMode::Outer;
  std::size_t top_k = 305;
  std::size_t folds = 10;
  Discretizer discretizer = Discretizer::Mdl;
  std::size_t sweep_step = 5;
};

struct EvaluationSettings {
  std::size_t repeats = 10;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
};

struct PipelineConfig {
  std::string corpus_dir;
  std::string output_dir = "emorec_out";
  std::string features_path;  // empty: <output_dir>/features.csv
  unsigned jobs = 1;
  ExtractionConfig extraction;
  SelectionSettings selection;
  std::string classifier = "svm";
  SvmConfig svm;
  MlpConfig mlp;
  EvaluationSettings evaluation;

  std::filesystem::path features_file() const {
    return features_path.empty() ? std::filesystem::path(output_dir) / "features.csv"
                                 : std::filesystem::path(features_path);
  }

  ClassifierConfig classifier_config() const {
    if (classifier == "svm") return svm;
    return mlp;
  }

  CvOptions cv_options() const {
    CvOptions o;
    o.repeats = evaluation.repeats;
    o.folds = evaluation.folds;
    o.seed = evaluation.seed;
    o.selection = selection.mode;
    o.top_k = selection.top_k;
    o.rank_folds = selection.folds;
    o.discretizer = selection.discretizer;
    o.jobs = jobs;
    return o;
  }
};

namespace detail {

inline std::string fmt_double(double v) { return format_double(v); }

template <typename T>
T parse_number(std::string_view key, std::string_view s) {
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      return static_cast<T>(parse_double(s));
    } catch (const Error&) {
      fail(ErrorCode::InvalidConfig, std::string(key) + ": not a number: '" + std::string(s) + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(ErrorCode::InvalidConfig, std::string(key) + ": not an integer: '" + std::string(s) + "'");
  }
  return v;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

struct ConfigField {
  std::string key;
  std::string help;
  bool hashed = true;  // location and parallelism keys do not affect results
  std::function<std::string()> get;
  std::function<void(std::string_view)> set;
};

/// Fields bound to `c`, in dump order.
inline std::vector<ConfigField> config_fields(PipelineConfig& c) {
  std::vector<ConfigField> f;
  const auto str = [&](std::string key, std::string help, std::string& v, bool hashed = true) {
    f.push_back({std::move(key), std::move(help), hashed, [&v] { return v; },
                 [&v](std::string_view s) { v = std::string(s); }});
  };
  const auto real = [&](std::string key, std::string help, double& v) {
    const std::string k = key;
    f.push_back({std::move(key), std::move(help), true, [&v] { return detail::fmt_double(v); },
                 [&v, k](std::string_view s) { v = detail::parse_number<double>(k, s); }});
  };
  const auto integer = [&](std::string key, std::string help, auto& v, bool hashed = true) {
    using T = std::remove_reference_t<decltype(v)>;
    const std::string k = key;
    f.push_back({std::move(key), std::move(help), hashed, [&v] { return std::to_string(v); },
                 [&v, k](std::string_view s) { v = detail::parse_number<T>(k, s); }});
  };

  str("corpus_dir", "directory of EMO-DB style WAV files", c.corpus_dir, false);
  str("output_dir", "directory for reports and the feature matrix", c.output_dir, false);
  str("features_path", "feature matrix CSV (empty: <output_dir>/features.csv)", c.features_path, false);
  integer("jobs", "worker threads", c.jobs, false);

  auto& v = c.extraction.vad;
  real("vad.frame_ms", "frame length in milliseconds", v.frame_ms);
  real("vad.overlap", "fractional frame overlap", v.overlap);
  real("vad.energy_low_frac", "low energy threshold, fraction of the energy range", v.energy_low_frac);
  real("vad.energy_high_frac", "high energy threshold, fraction of the energy range", v.energy_high_frac);
  real("vad.zcr_threshold", "zero-crossing rate separating unvoiced frames", v.zcr_threshold);
  real("vad.voicing_threshold", "normalized autocorrelation peak for voicing", v.voicing_threshold);
  integer("vad.min_run_frames", "shortest kept activity run / longest filled gap", v.min_run_frames);
  integer("vad.max_extension_frames", "endpoint extension limit per side", v.max_extension_frames);
  real("vad.pitch_min_hz", "lowest pitch for the voicing autocorrelation", v.pitch_min_hz);
  real("vad.pitch_max_hz", "highest pitch for the voicing autocorrelation", v.pitch_max_hz);
  real("vad.energy_floor", "activity floor for flat-energy clips", v.energy_floor);

  auto& m = c.extraction.mfcc;
  integer("mfcc.n_coeffs", "cepstral coefficients kept (c1..cN)", m.n_coeffs);
  integer("mfcc.n_mel_filters", "triangular mel filters", m.n_mel_filters);
  real("mfcc.pre_emphasis", "pre-emphasis coefficient", m.pre_emphasis);
  f.push_back({"mfcc.window", "analysis window (hamming|rectangular)", true,
               [&m] { return std::string(m.window == dsp::Window::Hamming ? "hamming" : "rectangular"); },
               [&m](std::string_view s) {
                 if (s == "hamming")
                   m.window = dsp::Window::Hamming;
                 else if (s == "rectangular")
                   m.window = dsp::Window::Rectangular;
                 else
                   fail(ErrorCode::InvalidConfig, "mfcc.window: expected hamming or rectangular");
               }});
  real("mfcc.fmin", "lowest mel filter edge in Hz", m.fmin);
  real("mfcc.fmax", "highest mel filter edge in Hz (0: Nyquist)", m.fmax);

  auto& p = c.extraction.pitch;
  real("pitch.f0_min", "lowest detectable pitch in Hz", p.f0_min);
  real("pitch.f0_max", "highest detectable pitch in Hz", p.f0_max);
  real("pitch.cepstral_peak_min", "minimum cepstral peak height", p.cepstral_peak_min);
  real("pitch.submultiple_ratio", "relative height for preferring a shorter period", p.submultiple_ratio);

  auto& b = c.extraction.bark;
  real("bark.fmin", "lowest bark filter center in Hz", b.fmin);
  real("bark.fmax", "highest bark filter center in Hz (0: Nyquist)", b.fmax);
  real("bark.spacing", "filter spacing in bark", b.spacing);
  real("bark.lower_slope", "lower skirt slope, decades per bark", b.lower_slope);
  real("bark.upper_slope", "upper skirt slope, decades per bark", b.upper_slope);

  auto& s = c.selection;
  f.push_back({"selection.mode", "feature selection placement (none|outer|paper-faithful)", true,
               [&s] { return selection_mode_name(s.mode); },
               [&s](std::string_view v) { s.mode = parse_selection_mode(v); }});
  integer("selection.top_k", "features kept after ranking", s.top_k);
  integer("selection.folds", "folds of the ranking cross-validation", s.folds);
  f.push_back({"selection.discretizer", "numeric discretization (mdl|equal-frequency)", true,
               [&s] { return std::string(s.discretizer == Discretizer::Mdl ? "mdl" : "equal-frequency"); },
               [&s](std::string_view v) {
                 if (v == "mdl")
                   s.discretizer = Discretizer::Mdl;
                 else if (v == "equal-frequency")
                   s.discretizer = Discretizer::EqualFrequency;
                 else
                   fail(ErrorCode::InvalidConfig, "selection.discretizer: expected mdl or equal-frequency");
               }});
  integer("selection.sweep_step", "feature-count step of the sweep", s.sweep_step);

  str("classifier.type", "classifier (svm|mlp)", c.classifier);
  real("svm.c", "SVM cost parameter", c.svm.c);
  integer("svm.kernel_degree", "polynomial kernel exponent", c.svm.kernel_degree);
  real("svm.tolerance", "SMO KKT tolerance", c.svm.tolerance);
  integer("svm.max_passes", "SMO stops after this many unchanged full passes", c.svm.max_passes);
  integer("svm.max_iterations", "SMO outer-loop cap", c.svm.max_iterations);
  integer("mlp.hidden_units", "hidden layer width", c.mlp.hidden_units);
  real("mlp.learning_rate", "backpropagation learning rate", c.mlp.learning_rate);
  real("mlp.momentum", "backpropagation momentum", c.mlp.momentum);
  integer("mlp.epochs", "training epochs", c.mlp.epochs);
  real("mlp.init_range", "initial weights uniform in [-r, r]", c.mlp.init_range);

  integer("evaluation.repeats", "cross-validation repeats", c.evaluation.repeats);
  integer("evaluation.folds", "cross-validation folds", c.evaluation.folds);
  integer("evaluation.seed", "base seed for folds, selection and training", c.evaluation.seed);
  return f;
}

inline void set_config_value(PipelineConfig& c, std::string_view key, std::string_view value) {
  for (auto& f : config_fields(c))
    if (f.key == key) {
      f.set(detail::trim(value));
      return;
    }
  fail(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
}

/// Applies `key=value` lines; blank lines and `#` comments are skipped.
inline void apply_config_text(PipelineConfig& c, std::istream& in) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::InvalidConfig, "config line " + std::to_string(n) + ": expected key=value");
    set_config_value(c, detail::trim(s.substr(0, eq)), s.substr(eq + 1));
  }
}

inline void load_config_file(PipelineConfig& c, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config " + path.string());
  apply_config_text(c, in);
}

inline void validate(const PipelineConfig& c) {
  validate(c.extraction.vad);
  validate(c.extraction.mfcc);
  if (c.extraction.mfcc.n_coeffs != kNumMfcc)
    fail(ErrorCode::InvalidConfig, "mfcc.n_coeffs must be 17 to match the feature schema");
  validate(c.svm);
  validate(c.mlp);
  if (c.classifier != "svm" && c.classifier != "mlp")
    fail(ErrorCode::InvalidConfig, "classifier.type must be svm or mlp");
  if (c.selection.top_k < 1) fail(ErrorCode::InvalidConfig, "selection.top_k must be >= 1");
  if (c.selection.folds < 2) fail(ErrorCode::InvalidConfig, "selection.folds must be >= 2");
  if (c.selection.sweep_step < 1) fail(ErrorCode::InvalidConfig, "selection.sweep_step must be >= 1");
  if (c.evaluation.repeats < 1) fail(ErrorCode::InvalidConfig, "evaluation.repeats must be >= 1");
  if (c.evaluation.folds < 2) fail(ErrorCode::InvalidConfig, "evaluation.folds must be >= 2");
  if (c.jobs < 1) fail(ErrorCode::InvalidConfig, "jobs must be >= 1");
}

/// Every field as key=value, one per line.
inline std::string dump_config(const PipelineConfig& c, bool hashed_only = false) {
  PipelineConfig copy = c;
  std::string out;
  for (const auto& f : config_fields(copy))
    if (!hashed_only || f.hashed) out += f.key + "=" + f.get() + "\n";
  return out;
}

/// FNV-1a 64 over the result-affecting fields, as 16 hex digits.
inline std::string config_hash(const PipelineConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : dump_config(c, true)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace emorec
