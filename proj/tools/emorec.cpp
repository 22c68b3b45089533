// emorec: segmentation, feature extraction, ranking and evaluation from the
// command line. Run `emorec <command> --help` for the options of a command.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "emorec/pipeline.hpp"

namespace {

using emorec::ErrorCode;

// Input, configuration and usage problems exit with 2; failures while
// computing results exit with 1.
int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedWav:
    case ErrorCode::UnsupportedEncoding:
    case ErrorCode::UnrecognizedName:
    case ErrorCode::UnknownEmotionCode:
    case ErrorCode::EmptyCorpus:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::IoError:
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnsupportedVersion:
      return 2;
    default:
      return 1;
  }
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct ConfigOptions {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_config_options(CLI::App* cmd, ConfigOptions& co) {
  cmd->add_option("--config", co.config_file, "key=value config file, applied before flags")
      ->check(CLI::ExistingFile);
  emorec::PipelineConfig defaults;
  for (auto& f : emorec::config_fields(defaults)) {
    auto& slot = co.values[f.key];
    auto* opt = cmd->add_option("--" + f.key, slot, f.help)->default_str(f.get());
    co.options[f.key] = opt;
  }
}

emorec::PipelineConfig resolve(const ConfigOptions& co) {
  emorec::PipelineConfig cfg;
  if (!co.config_file.empty()) emorec::load_config_file(cfg, co.config_file);
  for (const auto& [key, opt] : co.options)
    if (opt->count() > 0) emorec::set_config_value(cfg, key, co.values.at(key));
  emorec::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech emotion recognition: features, ranking and evaluation"};
  app.require_subcommand(1);
  // one option set per command: CLI11 counts flags per subcommand
  std::map<std::string, ConfigOptions> opts;
  std::string wav;

  auto* seg = app.add_subcommand("segment", "print voiced/unvoiced/pause intervals of a WAV file");
  seg->add_option("wav", wav, "input WAV file")->required();
  const std::map<std::string, std::string> about = {
      {"extract", "extract the feature matrix of every utterance in corpus_dir"},
      {"rank", "rank features by cross-validated gain ratio"},
      {"sweep", "accuracy versus number of top-ranked features"},
      {"train", "train a classifier on the whole feature matrix"},
      {"evaluate", "seven-class repeated stratified cross-validation"},
      {"pairwise", "cross-validation of all 21 emotion pairs"},
      {"arousal", "high versus low arousal cross-validation"},
      {"ablate", "cross-validation per feature-family subset"},
      {"config-dump", "print the resolved configuration"},
  };
  std::map<std::string, CLI::App*> cmds = {{"segment", seg}};
  add_config_options(seg, opts["segment"]);
  for (const auto& [name, help] : about) {
    cmds[name] = app.add_subcommand(name, help);
    add_config_options(cmds[name], opts[name]);
  }
  auto* schema = app.add_subcommand("schema", "print the 487 feature names in schema order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (schema->parsed()) {
      emorec::cmd_schema(std::cout);
      return 0;
    }
    std::string active;
    for (const auto& [name, cmd] : cmds)
      if (cmd->parsed()) active = name;
    const auto cfg = resolve(opts.at(active));
    const auto print_report = [&](const char* file) {
      std::cout << read_all(emorec::output_path(cfg, file));
    };
    if (seg->parsed()) {
      emorec::cmd_segment(cfg, wav, std::cout);
    } else if (cmds["config-dump"]->parsed()) {
      emorec::cmd_config_dump(cfg, std::cout);
    } else if (cmds["extract"]->parsed()) {
      emorec::cmd_extract(cfg, std::cerr);
    } else if (cmds["rank"]->parsed()) {
      emorec::cmd_rank(cfg);
      std::cout << "wrote " << emorec::output_path(cfg, "rank.csv").string() << '\n';
    } else if (cmds["sweep"]->parsed()) {
      emorec::cmd_sweep(cfg);
      print_report("sweep.txt");
    } else if (cmds["train"]->parsed()) {
      emorec::cmd_train(cfg);
      print_report("train.txt");
    } else if (cmds["evaluate"]->parsed()) {
      emorec::cmd_evaluate(cfg);
      print_report("evaluate.txt");
    } else if (cmds["pairwise"]->parsed()) {
      emorec::cmd_pairwise(cfg);
      print_report("pairwise.txt");
    } else if (cmds["arousal"]->parsed()) {
      emorec::cmd_arousal(cfg);
      print_report("arousal.txt");
    } else if (cmds["ablate"]->parsed()) {
      emorec::cmd_ablate(cfg);
      print_report("ablation.txt");
    }
  } catch (const emorec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
