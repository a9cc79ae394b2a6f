// Command-line front end: kgfuse <command> [--config PATH] [--seed N]
// [--out DIR] [--section.key VALUE ...]

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "kgfuse/error.hpp"
#include "kgfuse/pipeline.hpp"
#include "kgfuse/text.hpp"

namespace {

using kgfuse::ExitCode;
using kgfuse::RunConfig;

int code(ExitCode c) { return static_cast<int>(c); }

void apply_kb_selection(RunConfig& config, const std::string& selection) {
  if (selection == "all") {
    config.fusion.kb_enabled = {true, true, true};
    return;
  }
  config.fusion.kb_enabled = {false, false, false};
  if (selection == "none") return;
  for (const auto& name : kgfuse::split(selection, ',')) {
    const auto kb = kgfuse::knowledge_base_from_string(name);
    config.fusion.kb_enabled[static_cast<std::size_t>(kb)] = true;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Commonsense knowledge-graph fusion for multiple-choice reading comprehension"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> kb;
  bool no_reattention = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Base random seed");
  app.add_option("--out", out, "Output directory");
  app.add_option("--kb", kb, "Knowledge bases to use: all, none, or a comma list (conceptnet,webchild,atomic)");
  app.add_flag("--no-reattention", no_reattention, "Classify the fused CLS token directly");

  std::map<std::string, std::optional<std::string>> overrides;
  for (const auto& [key, value] : kgfuse::config_flag_defaults()) {
    if (key == "seed" || key == "out") continue;
    app.add_option("--" + key, overrides[key], "default: " + value)->group("Configuration overrides");
  }

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"build-index", "Parse enabled KBs and keep triples that fire on the prompts"},
      {"preprocess", "Build the subword vocab and write masked LM epochs"},
      {"train", "LM then classification fine-tuning; writes checkpoint and metrics"},
      {"eval", "Evaluate a checkpoint on the dev set"},
      {"pipeline", "build-index, preprocess, train and eval in sequence"},
      {"tune", "Grid search over batch size, learning rate, warmup and epochs"},
      {"gen-synthetic", "Write plain and planted-KB synthetic datasets with KB files"},
      {"align", "Align word-level tokens onto subword tokens (two whitespace-separated files)"},
      {"stem", "Print the stem of each word on stdin"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands) subs[c.name] = app.add_subcommand(c.name, c.help);

  std::optional<std::string> dataset;
  std::optional<std::string> vocab;
  std::optional<int> epoch;
  subs["preprocess"]->add_option("--dataset", dataset, "Dataset to mask (same as --paths.train)");
  subs["preprocess"]->add_option("--vocab", vocab, "Vocab file (same as --paths.vocab)");
  subs["preprocess"]->add_option("--epoch", epoch, "Write this epoch only, as JSONL at --out");
  std::string coarse_file;
  std::string fine_file;
  subs["align"]->add_option("coarse", coarse_file, "Word-level tokens")->required()->check(CLI::ExistingFile);
  subs["align"]->add_option("fine", fine_file, "Subword tokens")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return code(ExitCode::kConfigError);
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& [key, value] : overrides) {
      if (value) kgfuse::apply_override(config, key, *value);
    }
    if (kb) apply_kb_selection(config, *kb);
    if (no_reattention) config.fusion.reattention = false;
    if (seed) config.seed = *seed;
    if (out) config.out = *out;
    if (dataset) config.paths.train = *dataset;
    if (vocab) config.paths.vocab = *vocab;

    std::ostream& log = std::cerr;
    if (subs["build-index"]->parsed()) {
      kgfuse::cmd_build_index(config, log);
    } else if (subs["preprocess"]->parsed()) {
      kgfuse::cmd_preprocess(config, log, epoch);
    } else if (subs["train"]->parsed()) {
      kgfuse::cmd_train(config, log);
    } else if (subs["eval"]->parsed()) {
      std::cout << kgfuse::cmd_eval(config, log).to_json();
    } else if (subs["pipeline"]->parsed()) {
      std::cout << kgfuse::cmd_pipeline(config, log).to_json();
    } else if (subs["tune"]->parsed()) {
      std::cout << kgfuse::cmd_tune(config, log);
    } else if (subs["gen-synthetic"]->parsed()) {
      kgfuse::cmd_gen_synthetic(config, log);
    } else if (subs["align"]->parsed()) {
      kgfuse::cmd_align(coarse_file, fine_file, std::cout);
    } else if (subs["stem"]->parsed()) {
      kgfuse::cmd_stem(std::cin, std::cout);
    }
  } catch (const kgfuse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(e.exit_code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::kDataError);
  }
  return code(ExitCode::kOk);
}
