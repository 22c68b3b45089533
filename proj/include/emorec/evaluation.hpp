#pragma once

// Repeated stratified cross-validation, confusion matrices and the task
// variants (binary pairs, arousal, feature-family subsets).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "emorec/classifier.hpp"
#include "emorec/dataset.hpp"
#include "emorec/error.hpp"
#include "emorec/folds.hpp"
#include "emorec/labels.hpp"
#include "emorec/parallel.hpp"
#include "emorec/schema.hpp"
#include "emorec/selection.hpp"

namespace emorec {

/// Rows are true classes, columns predicted, both in ascending class id order.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<int> classes)
      : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
    counts_.assign(classes_.size() * classes_.size(), 0);
  }

  const std::vector<int>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

  std::size_t index_of(int cls) const {
    const auto it = std::lower_bound(classes_.begin(), classes_.end(), cls);
    if (it == classes_.end() || *it != cls)
      fail(ErrorCode::UnknownClass, "class " + std::to_string(cls) + " not in confusion matrix");
    return static_cast<std::size_t>(it - classes_.begin());
  }

  void add(int truth, int predicted, std::size_t n = 1) {
    counts_[index_of(truth) * size() + index_of(predicted)] += n;
  }

  std::size_t count(std::size_t row, std::size_t col) const { return counts_[row * size() + col]; }
  std::size_t at(int truth, int predicted) const { return count(index_of(truth), index_of(predicted)); }

  std::size_t row_sum(std::size_t row) const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < size(); ++c) s += count(row, c);
    return s;
  }

  std::size_t total() const {
    std::size_t s = 0;
    for (auto v : counts_) s += v;
    return s;
  }

  std::size_t correct() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += count(i, i);
    return s;
  }

  double accuracy() const {
    const auto t = total();
    return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
  }

  void merge(const ConfusionMatrix& o) {
    if (o.classes_ != classes_) fail(ErrorCode::DimensionMismatch, "confusion matrices differ in classes");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
  }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<int> classes_;
  std::vector<std::size_t> counts_;
};

/// Recall of one class; EmptyClass when its row is empty.
inline double recall(const ConfusionMatrix& cm, int cls) {
  const std::size_t i = cm.index_of(cls);
  const std::size_t n = cm.row_sum(i);
  if (n == 0) fail(ErrorCode::EmptyClass, "class " + std::to_string(cls) + " has no instances");
  return static_cast<double>(cm.count(i, i)) / static_cast<double>(n);
}

/// Diagonal over row sum for every class with at least one instance; classes
/// with an empty row are absent from the result.
inline std::map<int, double> per_class_recall(const ConfusionMatrix& cm) {
  std::map<int, double> out;
  for (std::size_t i = 0; i < cm.size(); ++i)
    if (cm.row_sum(i) > 0) out[cm.classes()[i]] = recall(cm, cm.classes()[i]);
  return out;
}

// Tasks

struct SevenClass {};
struct BinaryPair {
  Label a;
  Label b;
};
struct Arousal {};
using TaskKind = std::variant<SevenClass, BinaryPair, Arousal>;

inline std::string task_name(const TaskKind& k) {
  if (std::holds_alternative<SevenClass>(k)) return "seven_class";
  if (std::holds_alternative<Arousal>(k)) return "arousal";
  const auto& p = std::get<BinaryPair>(k);
  return std::string(label_name(p.a)) + "_vs_" + std::string(label_name(p.b));
}

inline LabeledDataset make_task(const LabeledDataset& d, const TaskKind& kind) {
  if (std::holds_alternative<SevenClass>(kind)) {
    for (Label l : d.labels)
      if (!is_emotion(l)) fail(ErrorCode::UnknownClass, "seven-class task needs emotion labels");
    return d;
  }
  if (const auto* p = std::get_if<BinaryPair>(&kind)) {
    if (!is_emotion(p->a) || !is_emotion(p->b) || p->a == p->b)
      fail(ErrorCode::UnknownClass, "a binary pair needs two distinct emotions");
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < d.size(); ++r)
      if (d.labels[r] == p->a || d.labels[r] == p->b) rows.push_back(r);
    return d.select_rows(rows);
  }
  LabeledDataset out = d;
  for (auto& l : out.labels) {
    if (!is_emotion(l)) fail(ErrorCode::UnknownClass, "arousal task needs emotion labels");
    l = is_high_arousal(l) ? Label::HighArousal : Label::LowArousal;
  }
  return out;
}

/// All 21 unordered pairs of the seven emotions, in label order.
inline std::vector<BinaryPair> all_emotion_pairs() {
  std::vector<BinaryPair> out;
  for (std::size_t i = 0; i < kEmotions.size(); ++i)
    for (std::size_t j = i + 1; j < kEmotions.size(); ++j) out.push_back({kEmotions[i], kEmotions[j]});
  return out;
}

// Cross-validation

enum class SelectionMode { None, Outer, PaperFaithful };

inline std::string selection_mode_name(SelectionMode m) {
  switch (m) {
    case SelectionMode::None: return "none";
    case SelectionMode::Outer: return "outer";
    case SelectionMode::PaperFaithful: return "paper-faithful";
  }
  return "none";
}

inline SelectionMode parse_selection_mode(std::string_view s) {
  if (s == "none") return SelectionMode::None;
  if (s == "outer") return SelectionMode::Outer;
  if (s == "paper-faithful") return SelectionMode::PaperFaithful;
  fail(ErrorCode::InvalidConfig, "unknown selection mode '" + std::string(s) + "'");
}

struct CvOptions {
  std::size_t repeats = 10;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  SelectionMode selection = SelectionMode::None;
  std::size_t top_k = 305;
  std::size_t rank_folds = 10;
  Discretizer discretizer = Discretizer::Mdl;
  unsigned jobs = 1;
};

struct CvResult {
  ConfusionMatrix confusion;  // summed over repeats
  std::vector<double> repeat_accuracy;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation over repeats
  std::size_t num_features = 0;
};

namespace detail {

inline std::vector<std::size_t> top_columns(const Matrix& x, std::span<const int> y,
                                            const CvOptions& opt, std::uint64_t seed) {
  RankOptions ro;
  ro.folds = opt.rank_folds;
  ro.seed = seed;
  ro.discretizer = opt.discretizer;
  return rank_cv(x, y, ro).top(opt.top_k);
}

}  // namespace detail

/// `repeats` rounds of stratified k-fold CV; round r uses seed + r for its
/// folds. Selection, when enabled, is either recomputed on each training
/// partition (Outer) or done once on all rows (PaperFaithful).
inline CvResult cross_validate(const Matrix& x, std::span<const int> labels,
                               const ClassifierConfig& cfg, const CvOptions& opt) {
  if (x.rows() != labels.size()) fail(ErrorCode::DimensionMismatch, "rows and labels differ");
  if (x.rows() == 0) fail(ErrorCode::InvalidDataset, "cannot cross-validate an empty dataset");
  if (opt.repeats < 1 || opt.folds < 2) fail(ErrorCode::InvalidConfig, "need repeats >= 1 and folds >= 2");
  if (opt.selection != SelectionMode::None && opt.top_k < 1)
    fail(ErrorCode::InvalidConfig, "selection top_k must be >= 1");

  std::optional<std::vector<std::size_t>> global_cols;
  if (opt.selection == SelectionMode::PaperFaithful)
    global_cols = detail::top_columns(x, labels, opt, opt.seed);

  const std::size_t tasks = opt.repeats * opt.folds;
  std::vector<std::vector<std::size_t>> fold_rows(tasks);
  for (std::size_t r = 0; r < opt.repeats; ++r) {
    auto folds = stratified_folds(labels, opt.folds, opt.seed + r);
    for (std::size_t f = 0; f < opt.folds; ++f) fold_rows[r * opt.folds + f] = std::move(folds[f]);
  }

  std::vector<std::vector<int>> predictions(tasks);
  std::vector<std::size_t> used_features(tasks, x.cols());
  parallel_for(tasks, opt.jobs, [&](std::size_t t) {
    const std::size_t r = t / opt.folds, f = t % opt.folds;
    const auto& test = fold_rows[t];
    if (test.empty()) return;
    std::vector<std::size_t> train_rows;
    {
      std::vector<char> held(labels.size(), 0);
      for (std::size_t i : test) held[i] = 1;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (!held[i]) train_rows.push_back(i);
    }
    Matrix xtr = x.select_rows(train_rows);
    std::vector<int> ytr(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) ytr[i] = labels[train_rows[i]];
    Matrix xte = x.select_rows(test);
    const std::uint64_t fold_seed = derive_seed(opt.seed + r, f);

    std::vector<std::size_t> cols;
    if (global_cols)
      cols = *global_cols;
    else if (opt.selection == SelectionMode::Outer)
      cols = detail::top_columns(xtr, ytr, opt, derive_seed(fold_seed, 1));
    if (!cols.empty()) {
      xtr = xtr.select_columns(cols);
      xte = xte.select_columns(cols);
      used_features[t] = cols.size();
    }
    predictions[t] = train(xtr, ytr, cfg, fold_seed).predict(xte);
  });

  std::vector<int> classes(labels.begin(), labels.end());
  CvResult res;
  res.confusion = ConfusionMatrix(classes);
  res.num_features = used_features.empty() ? x.cols() : used_features.front();
  for (std::size_t r = 0; r < opt.repeats; ++r) {
    ConfusionMatrix cm(classes);
    for (std::size_t f = 0; f < opt.folds; ++f) {
      const std::size_t t = r * opt.folds + f;
      for (std::size_t i = 0; i < fold_rows[t].size(); ++i)
        cm.add(labels[fold_rows[t][i]], predictions[t][i]);
    }
    res.repeat_accuracy.push_back(cm.accuracy());
    res.confusion.merge(cm);
  }
  const double n = static_cast<double>(opt.repeats);
  double sum = 0.0;
  for (double a : res.repeat_accuracy) sum += a;
  res.mean_accuracy = sum / n;
  double ss = 0.0;
  for (double a : res.repeat_accuracy) ss += (a - res.mean_accuracy) * (a - res.mean_accuracy);
  res.std_accuracy = opt.repeats > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return res;
}

inline CvResult cross_validate(const LabeledDataset& d, const ClassifierConfig& cfg,
                               const CvOptions& opt) {
  const auto y = d.class_ids();
  return cross_validate(d.values, y, cfg, opt);
}

// Feature-family subsets

struct FeatureSet {
  std::string name;
  std::vector<Family> families;
};

/// The named subsets compared in the ablation study.
inline std::vector<FeatureSet> ablation_sets() {
  using F = Family;
  const std::vector<F> mfcc = {F::MfccVoiced, F::MfccUnvoiced};
  const std::vector<F> loudness = {F::LoudnessVoiced, F::LoudnessUnvoiced};
  return {
      {"mfcc_only", mfcc},
      {"loudness_rhythm", {F::LoudnessVoiced, F::LoudnessUnvoiced, F::RhythmTemporal}},
      {"loudness", loudness},
      {"except_mfcc", {F::LoudnessVoiced, F::LoudnessUnvoiced, F::Pitch, F::Energy, F::RhythmTemporal}},
      {"rhythm_only", {F::RhythmTemporal}},
      {"mfcc_rhythm", {F::MfccVoiced, F::MfccUnvoiced, F::RhythmTemporal}},
      {"mfcc_unvoiced", {F::MfccUnvoiced}},
      {"mfcc_voiced", {F::MfccVoiced}},
  };
}

/// Schema indices of the union of families, ascending.
inline std::vector<std::size_t> family_indices(std::span<const Family> families) {
  std::vector<std::size_t> out;
  for (Family f : families) {
    const auto idx = feature_schema().indices_of(f);
    out.insert(out.end(), idx.begin(), idx.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) fail(ErrorCode::EmptySubset, "feature subset is empty");
  return out;
}

inline void require_full_schema(const LabeledDataset& d) {
  if (d.feature_names != feature_schema().names())
    fail(ErrorCode::SchemaMismatch, "dataset columns do not follow the feature schema");
}

struct TaskSpec {
  TaskKind kind = SevenClass{};
  std::vector<Family> families;  // empty: all features
};

inline CvResult run_task(const LabeledDataset& d, const TaskSpec& spec, const ClassifierConfig& cfg,
                         const CvOptions& opt) {
  LabeledDataset t = make_task(d, spec.kind);
  if (!spec.families.empty()) {
    require_full_schema(t);
    t = t.select_columns(family_indices(spec.families));
  }
  return cross_validate(t, cfg, opt);
}

struct AblationRow {
  std::string name;
  std::size_t num_features = 0;
  CvResult result;
};

inline std::vector<AblationRow> ablate(const LabeledDataset& d, const std::vector<FeatureSet>& sets,
                                       const ClassifierConfig& cfg, const CvOptions& opt) {
  require_full_schema(d);
  std::vector<AblationRow> out;
  for (const auto& s : sets) {
    const auto cols = family_indices(s.families);
    out.push_back({s.name, cols.size(), cross_validate(d.select_columns(cols), cfg, opt)});
  }
  return out;
}

}  // namespace emorec
