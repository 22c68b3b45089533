#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "emorec/pipeline.hpp"
#include "support/corpus.hpp"
#include "support/error_code.hpp"

using namespace emorec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// small but complete run settings
PipelineConfig small_config(const fs::path& corpus, const fs::path& out) {
  PipelineConfig c;
  c.corpus_dir = corpus.string();
  c.output_dir = out.string();
  c.selection.top_k = 40;
  c.selection.folds = 3;
  c.selection.sweep_step = 100;
  c.evaluation.repeats = 2;
  c.evaluation.folds = 3;
  c.jobs = 2;
  return c;
}

const fs::path& shared_corpus() {
  static const fs::path dir = [] {
    auto d = fixtures::temp_dir("pipeline_corpus");
    fixtures::write_synthetic_corpus(d, 6);
    return d;
  }();
  return dir;
}

const std::vector<std::string> kOutputs = {
    "features.csv",         "rank.csv",       "sweep.csv",           "model.txt",
    "model_features.txt",   "evaluate_confusion.csv", "evaluate_summary.csv", "evaluate_recall.csv",
    "pairwise.csv",         "arousal.csv",    "arousal_confusion.csv", "ablation.csv"};

void run_all(const PipelineConfig& c) {
  std::ostringstream log;
  cmd_extract(c, log);
  cmd_rank(c);
  cmd_sweep(c);
  cmd_train(c);
  cmd_evaluate(c);
  cmd_pairwise(c);
  cmd_arousal(c);
  cmd_ablate(c);
}

}  // namespace

TEST_CASE("segment prints intervals") {
  const auto dir = fixtures::temp_dir("segment");
  std::vector<double> x(8000, 0.0);
  fixtures::append(x, fixtures::sawtooth(150.0, 16000, 0.0, 0.5));
  fixtures::append(x, std::vector<double>(8000, 0.0));
  save_wav(fixtures::clip(x), dir / "tone.wav");
  save_wav(fixtures::clip(std::vector<double>(16000, 0.0)), dir / "silence.wav");

  std::ostringstream out;
  const auto seg = cmd_segment(PipelineConfig{}, dir / "tone.wav", out);
  const auto text = out.str();
  CHECK(line_count(text) == seg.intervals.size());
  CHECK(text.find("\tvoiced\n") != std::string::npos);
  CHECK(text.rfind("0.000000\t", 0) == 0);

  std::ostringstream quiet;
  cmd_segment(PipelineConfig{}, dir / "silence.wav", quiet);
  CHECK(quiet.str() == "0.000000\t1.000000\tpause\n");

  CHECK(code_of([&] { cmd_segment(PipelineConfig{}, dir / "missing.wav", out); }) == ErrorCode::IoError);
}

TEST_CASE("full pipeline on a synthetic corpus") {
  const auto out = fixtures::temp_dir("pipeline_out");
  const auto c = small_config(shared_corpus(), out);

  std::ostringstream log;
  const auto ex = cmd_extract(c, log);
  CHECK(ex.dataset.size() == 42);
  CHECK(ex.skipped == 0);
  CHECK(log.str().find("extracted 42 utterances") != std::string::npos);
  const auto features = slurp(out / "features.csv");
  CHECK(features.rfind("# provenance=emorec-extract config_hash=" + config_hash(c), 0) == 0);
  CHECK(load_feature_matrix(out / "features.csv").values == ex.dataset.values);

  const auto ranked = cmd_rank(c);
  CHECK(ranked.order.size() == kNumFeatures);
  const auto rank_csv = slurp(out / "rank.csv");
  CHECK(line_count(rank_csv) == kNumFeatures + 1);
  CHECK(rank_csv.rfind("rank,feature_name,score\n1,", 0) == 0);

  const auto curve = cmd_sweep(c);
  CHECK(curve.points.size() == 5);  // 100..400 and 487
  CHECK(line_count(slurp(out / "sweep.csv")) == 6);

  const auto trained = cmd_train(c);
  CHECK(trained.columns.size() == 40);
  CHECK(line_count(slurp(out / "model_features.txt")) == 40);
  CHECK(load_model(out / "model.txt") == trained.model);
  CHECK(trained.training_accuracy >= 0.9);

  const auto eval = cmd_evaluate(c);
  CHECK(eval.confusion.total() == 84);
  CHECK(eval.num_features == 40);
  INFO("seven-class accuracy " << eval.mean_accuracy);
  CHECK(eval.mean_accuracy >= 0.6);
  const auto summary = slurp(out / "evaluate_summary.csv");
  CHECK(summary.rfind("task,", 0) == 0);
  CHECK(line_count(slurp(out / "evaluate_recall.csv")) == 8);
  const auto report = slurp(out / "evaluate.txt");
  CHECK(report.find("config_hash: " + config_hash(c)) != std::string::npos);
  CHECK(report.find("seed: 1") != std::string::npos);

  CHECK(cmd_pairwise(c).size() == 21);
  CHECK(line_count(slurp(out / "pairwise.csv")) == 22);

  const auto arousal = cmd_arousal(c);
  REQUIRE(arousal.size() == 3);
  CHECK(arousal[1].features == 408 + 19);
  CHECK(arousal[2].features == 19);

  const auto ablation = cmd_ablate(c);
  CHECK(ablation.size() == 8);
  CHECK(line_count(slurp(out / "ablation.csv")) == 9);
}

TEST_CASE("reruns give byte-identical outputs") {
  const auto a = fixtures::temp_dir("pipeline_a");
  const auto b = fixtures::temp_dir("pipeline_b");
  auto ca = small_config(shared_corpus(), a);
  auto cb = small_config(shared_corpus(), b);
  cb.jobs = 1;
  run_all(ca);
  run_all(cb);
  for (const auto& name : kOutputs) {
    INFO(name);
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK_FALSE(slurp(a / name).empty());
  }
}

TEST_CASE("pipeline errors") {
  const auto empty = fixtures::temp_dir("pipeline_empty");
  std::ofstream(empty / "readme.txt") << "nothing here\n";
  std::ofstream(empty / "99a01Wa.wav") << "not audio";
  auto c = small_config(empty, empty / "out");
  std::ostringstream log;
  CHECK(code_of([&] { cmd_extract(c, log); }) == ErrorCode::EmptyCorpus);

  c.corpus_dir.clear();
  CHECK(code_of([&] { cmd_extract(c, log); }) == ErrorCode::InvalidConfig);

  c.output_dir = (empty / "none").string();
  CHECK(code_of([&] { cmd_evaluate(c); }) == ErrorCode::IoError);

  std::ostringstream names;
  cmd_schema(names);
  CHECK(line_count(names.str()) == kNumFeatures);
}
