#pragma once

// Command implementations behind the emorec tool. Each command reads the
// resolved config, writes its reports under output_dir and returns the
// computed result. File contents depend only on the config and the inputs.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "emorec/classifier.hpp"
#include "emorec/config.hpp"
#include "emorec/corpus_io.hpp"
#include "emorec/evaluation.hpp"
#include "emorec/features.hpp"
#include "emorec/parallel.hpp"
#include "emorec/schema.hpp"
#include "emorec/segmentation.hpp"
#include "emorec/selection.hpp"
#include "emorec/sweep.hpp"

namespace emorec {

namespace fs = std::filesystem;

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

inline std::string report_header(const PipelineConfig& cfg, std::string_view command,
                                 std::string_view task) {
  std::ostringstream s;
  s << "command: " << command << '\n'
    << "task: " << task << '\n'
    << "config_hash: " << config_hash(cfg) << '\n'
    << "seed: " << cfg.evaluation.seed << '\n'
    << "classifier: " << cfg.classifier << '\n'
    << "selection: " << selection_mode_name(cfg.selection.mode) << " top_k=" << cfg.selection.top_k
    << '\n'
    << "cv: " << cfg.evaluation.repeats << "x" << cfg.evaluation.folds << "-fold stratified\n";
  return s.str();
}

inline std::string class_name(int id) { return std::string(label_name(static_cast<Label>(id))); }

inline std::string confusion_table(const ConfusionMatrix& cm) {
  std::size_t w = 9;
  for (int c : cm.classes()) w = std::max(w, class_name(c).size() + 1);
  std::ostringstream s;
  s << std::left << std::setw(static_cast<int>(w)) << "true\\pred";
  for (int c : cm.classes()) s << std::right << std::setw(static_cast<int>(w)) << class_name(c);
  s << '\n';
  for (std::size_t i = 0; i < cm.size(); ++i) {
    s << std::left << std::setw(static_cast<int>(w)) << class_name(cm.classes()[i]);
    for (std::size_t j = 0; j < cm.size(); ++j)
      s << std::right << std::setw(static_cast<int>(w)) << cm.count(i, j);
    s << '\n';
  }
  return s.str();
}

inline std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string s = "true_label,predicted_label,count\n";
  for (std::size_t i = 0; i < cm.size(); ++i)
    for (std::size_t j = 0; j < cm.size(); ++j)
      s += class_name(cm.classes()[i]) + "," + class_name(cm.classes()[j]) + "," +
           std::to_string(cm.count(i, j)) + "\n";
  return s;
}

struct SummaryRow {
  std::string task;
  std::size_t features = 0;
  std::size_t instances = 0;
  CvResult result;
};

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string s = "task,accuracy,std\n";
  for (const auto& r : rows)
    s += r.task + "," + fixed(r.result.mean_accuracy) + "," + fixed(r.result.std_accuracy) + "\n";
  return s;
}

inline std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::size_t w = 4;
  for (const auto& r : rows) w = std::max(w, r.task.size());
  std::ostringstream s;
  s << std::left << std::setw(static_cast<int>(w)) << "task" << "  instances  features  accuracy     std\n";
  for (const auto& r : rows)
    s << std::left << std::setw(static_cast<int>(w)) << r.task << std::right << "  " << std::setw(9)
      << r.instances << "  " << std::setw(8) << r.features << "  " << std::setw(7)
      << fixed(100.0 * r.result.mean_accuracy, 2) << "%  " << std::setw(6)
      << fixed(100.0 * r.result.std_accuracy, 2) << "\n";
  return s.str();
}

/// Selection top-k cannot exceed the columns available.
inline CvOptions cv_options_for(const PipelineConfig& cfg, std::size_t columns) {
  CvOptions o = cfg.cv_options();
  o.top_k = std::min(o.top_k, columns);
  return o;
}

}  // namespace detail

inline fs::path output_path(const PipelineConfig& cfg, const std::string& name) {
  return fs::path(cfg.output_dir) / name;
}

inline LabeledDataset load_features(const PipelineConfig& cfg) {
  auto d = load_feature_matrix(cfg.features_file());
  if (d.size() == 0) fail(ErrorCode::InvalidDataset, "feature matrix has no rows");
  return d;
}

// segment

/// One `start<TAB>end<TAB>class` line per interval, seconds with 6 decimals.
inline Segmentation cmd_segment(const PipelineConfig& cfg, const fs::path& wav, std::ostream& out) {
  const auto clip = load_wav(wav);
  const auto seg = segment(clip, cfg.extraction.vad);
  for (const auto& iv : seg.intervals)
    out << detail::fixed(seg.start(iv)) << '\t' << detail::fixed(seg.end(iv)) << '\t'
        << segment_class_name(iv.cls) << '\n';
  return seg;
}

// extract

struct ExtractResult {
  LabeledDataset dataset;
  std::vector<std::string> warnings;
  std::size_t skipped = 0;
};

inline ExtractResult cmd_extract(const PipelineConfig& cfg, std::ostream& log) {
  const auto started = std::chrono::steady_clock::now();
  if (cfg.corpus_dir.empty()) fail(ErrorCode::InvalidConfig, "corpus_dir is not set");
  auto corpus = load_corpus(cfg.corpus_dir);
  ExtractResult res;
  res.warnings = corpus.warnings;
  res.skipped = corpus.skipped;

  const std::size_t n = corpus.entries.size();
  std::vector<std::optional<FeatureVector>> rows(n);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    try {
      rows[i] = extract_features(corpus.entries[i].clip, cfg.extraction);
    } catch (const Error& e) {
      errors[i] = corpus.entries[i].clip.source_id + ": " + e.what();
    }
  });

  auto& d = res.dataset;
  d.feature_names = feature_schema().names();
  d.values = Matrix(0, kNumFeatures);
  d.provenance = "emorec-extract config_hash=" + config_hash(cfg);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i]) {
      res.warnings.push_back("skipped " + errors[i]);
      ++res.skipped;
      continue;
    }
    const auto& e = corpus.entries[i];
    d.add_row(rows[i]->values, e.meta.emotion, e.meta.speaker_id, e.clip.source_id);
  }
  for (const auto& w : res.warnings) log << "warning: " << w << '\n';
  if (d.size() == 0) fail(ErrorCode::EmptyCorpus, "no utterance could be processed");
  if (cfg.features_file().has_parent_path()) fs::create_directories(cfg.features_file().parent_path());
  save_feature_matrix(d, cfg.features_file());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  log << "extracted " << d.size() << " utterances (" << res.skipped << " skipped) in "
      << detail::fixed(secs, 1) << " s -> " << cfg.features_file().string() << '\n';
  return res;
}

// rank

inline RankedFeatures rank_dataset(const PipelineConfig& cfg, const LabeledDataset& d) {
  RankOptions ro;
  ro.folds = cfg.selection.folds;
  ro.seed = cfg.evaluation.seed;
  ro.discretizer = cfg.selection.discretizer;
  ro.jobs = cfg.jobs;
  return rank_cv(d.values, d.class_ids(), ro);
}

inline RankedFeatures cmd_rank(const PipelineConfig& cfg) {
  const auto d = make_task(load_features(cfg), SevenClass{});
  const auto ranked = rank_dataset(cfg, d);
  std::string csv = "rank,feature_name,score\n";
  std::ostringstream txt;
  txt << detail::report_header(cfg, "rank", "seven_class") << "instances: " << d.size() << "\n\n";
  txt << "rank  score     feature\n";
  for (std::size_t r = 0; r < ranked.order.size(); ++r) {
    const std::size_t i = ranked.order[r];
    csv += std::to_string(r + 1) + "," + d.feature_names[i] + "," +
           detail::format_double(ranked.scores[i]) + "\n";
    txt << std::setw(4) << r + 1 << "  " << detail::fixed(ranked.scores[i]) << "  "
        << d.feature_names[i] << '\n';
  }
  detail::write_text(output_path(cfg, "rank.csv"), csv);
  detail::write_text(output_path(cfg, "rank.txt"), txt.str());
  return ranked;
}

// sweep

inline SweepCurve cmd_sweep(const PipelineConfig& cfg) {
  const auto d = make_task(load_features(cfg), SevenClass{});
  const auto ranked = rank_dataset(cfg, d);
  const auto ks = sweep_counts(d.num_features(), cfg.selection.sweep_step);
  const auto y = d.class_ids();
  const auto curve = sweep(d.values, y, ranked.order, cfg.classifier_config(), ks,
                           detail::cv_options_for(cfg, d.num_features()));
  std::string csv = "k,accuracy\n";
  std::ostringstream txt;
  txt << detail::report_header(cfg, "sweep", "seven_class") << "instances: " << d.size()
      << "\nranking: global\n\n   k  accuracy\n";
  for (const auto& [k, acc] : curve.points) {
    csv += std::to_string(k) + "," + detail::fixed(acc) + "\n";
    txt << std::setw(4) << k << "  " << detail::fixed(100.0 * acc, 2) << "%\n";
  }
  txt << "\nbest_k: " << curve.best_k << '\n';
  detail::write_text(output_path(cfg, "sweep.csv"), csv);
  detail::write_text(output_path(cfg, "sweep.txt"), txt.str());
  return curve;
}

// train

struct TrainResult {
  Model model;
  std::vector<std::size_t> columns;
  double training_accuracy = 0.0;
};

inline TrainResult cmd_train(const PipelineConfig& cfg) {
  const auto d = make_task(load_features(cfg), SevenClass{});
  TrainResult res;
  if (cfg.selection.mode == SelectionMode::None) {
    res.columns.resize(d.num_features());
    std::iota(res.columns.begin(), res.columns.end(), 0);
  } else {
    res.columns = rank_dataset(cfg, d).top(cfg.selection.top_k);
  }
  const Matrix x = d.values.select_columns(res.columns);
  const auto y = d.class_ids();
  res.model = train(x, y, cfg.classifier_config(), cfg.evaluation.seed);
  const auto pred = res.model.predict(x);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += pred[i] == y[i];
  res.training_accuracy = static_cast<double>(ok) / static_cast<double>(y.size());

  fs::create_directories(cfg.output_dir);
  save_model(output_path(cfg, "model.txt"), res.model);
  std::string names;
  for (std::size_t c : res.columns) names += d.feature_names[c] + "\n";
  detail::write_text(output_path(cfg, "model_features.txt"), names);
  std::ostringstream txt;
  txt << detail::report_header(cfg, "train", "seven_class") << "instances: " << d.size()
      << "\nfeatures: " << res.columns.size()
      << "\ntraining_accuracy: " << detail::fixed(res.training_accuracy) << '\n';
  detail::write_text(output_path(cfg, "train.txt"), txt.str());
  return res;
}

// evaluate

inline CvResult cmd_evaluate(const PipelineConfig& cfg) {
  const auto d = make_task(load_features(cfg), SevenClass{});
  const auto res = cross_validate(d, cfg.classifier_config(), detail::cv_options_for(cfg, d.num_features()));
  const std::vector<detail::SummaryRow> rows = {{"seven_class", res.num_features, d.size(), res}};

  std::string recall_csv = "label,recall\n";
  std::ostringstream txt;
  txt << detail::report_header(cfg, "evaluate", "seven_class") << '\n'
      << detail::summary_table(rows) << "\nconfusion (summed over repeats)\n"
      << detail::confusion_table(res.confusion) << "\nrecall\n";
  for (const auto& [cls, r] : per_class_recall(res.confusion)) {
    recall_csv += detail::class_name(cls) + "," + detail::fixed(r) + "\n";
    txt << std::left << std::setw(12) << detail::class_name(cls) << std::right
        << detail::fixed(100.0 * r, 2) << "%\n";
  }
  detail::write_text(output_path(cfg, "evaluate_confusion.csv"), detail::confusion_csv(res.confusion));
  detail::write_text(output_path(cfg, "evaluate_summary.csv"), detail::summary_csv(rows));
  detail::write_text(output_path(cfg, "evaluate_recall.csv"), recall_csv);
  detail::write_text(output_path(cfg, "evaluate.txt"), txt.str());
  return res;
}

// pairwise, arousal, ablate

inline std::vector<detail::SummaryRow> cmd_pairwise(const PipelineConfig& cfg) {
  const auto d = load_features(cfg);
  std::vector<detail::SummaryRow> rows;
  for (const auto& pair : all_emotion_pairs()) {
    const auto t = make_task(d, pair);
    const auto res = cross_validate(t, cfg.classifier_config(), detail::cv_options_for(cfg, t.num_features()));
    rows.push_back({task_name(pair), res.num_features, t.size(), res});
  }
  std::ostringstream txt;
  txt << detail::report_header(cfg, "pairwise", "binary_pairs") << '\n' << detail::summary_table(rows);
  detail::write_text(output_path(cfg, "pairwise.csv"), detail::summary_csv(rows));
  detail::write_text(output_path(cfg, "pairwise.txt"), txt.str());
  return rows;
}

/// Arousal on all features (with the configured selection), on MFCC+rhythm
/// and on rhythm alone (family subsets without selection).
inline std::vector<detail::SummaryRow> cmd_arousal(const PipelineConfig& cfg) {
  const auto d = make_task(load_features(cfg), Arousal{});
  require_full_schema(d);
  std::vector<detail::SummaryRow> rows;
  {
    const auto res = cross_validate(d, cfg.classifier_config(), detail::cv_options_for(cfg, d.num_features()));
    rows.push_back({"arousal_all", res.num_features, d.size(), res});
  }
  CvOptions plain = cfg.cv_options();
  plain.selection = SelectionMode::None;
  for (const auto& [name, fams] :
       std::vector<std::pair<std::string, std::vector<Family>>>{
           {"arousal_mfcc_rhythm", {Family::MfccVoiced, Family::MfccUnvoiced, Family::RhythmTemporal}},
           {"arousal_rhythm_only", {Family::RhythmTemporal}}}) {
    const auto sub = d.select_columns(family_indices(fams));
    const auto res = cross_validate(sub, cfg.classifier_config(), plain);
    rows.push_back({name, res.num_features, sub.size(), res});
  }
  std::ostringstream txt;
  txt << detail::report_header(cfg, "arousal", "arousal") << '\n' << detail::summary_table(rows)
      << "\nconfusion, arousal_all (summed over repeats)\n"
      << detail::confusion_table(rows.front().result.confusion);
  detail::write_text(output_path(cfg, "arousal.csv"), detail::summary_csv(rows));
  detail::write_text(output_path(cfg, "arousal_confusion.csv"),
                     detail::confusion_csv(rows.front().result.confusion));
  detail::write_text(output_path(cfg, "arousal.txt"), txt.str());
  return rows;
}

/// Seven-class accuracy for each named feature-family subset, no selection.
inline std::vector<detail::SummaryRow> cmd_ablate(const PipelineConfig& cfg) {
  const auto d = make_task(load_features(cfg), SevenClass{});
  CvOptions plain = cfg.cv_options();
  plain.selection = SelectionMode::None;
  std::vector<detail::SummaryRow> rows;
  for (auto& r : ablate(d, ablation_sets(), cfg.classifier_config(), plain))
    rows.push_back({r.name, r.num_features, d.size(), std::move(r.result)});
  std::ostringstream txt;
  txt << detail::report_header(cfg, "ablate", "seven_class") << "selection applied: none\n\n"
      << detail::summary_table(rows);
  detail::write_text(output_path(cfg, "ablation.csv"), detail::summary_csv(rows));
  detail::write_text(output_path(cfg, "ablation.txt"), txt.str());
  return rows;
}

// schema, config-dump

inline void cmd_schema(std::ostream& out) {
  for (const auto& name : feature_schema().names()) out << name << '\n';
}

inline void cmd_config_dump(const PipelineConfig& cfg, std::ostream& out) {
  out << dump_config(cfg) << "# config_hash=" << config_hash(cfg) << '\n';
}

}  // namespace emorec
