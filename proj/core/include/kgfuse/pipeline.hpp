#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgfuse/kb.hpp"
#include "kgfuse/lm_prep.hpp"
#include "kgfuse/model.hpp"
#include "kgfuse/synthetic.hpp"
#include "kgfuse/train.hpp"

namespace kgfuse {

struct PathConfig {
  std::filesystem::path train;
  std::filesystem::path dev;
  std::filesystem::path conceptnet;
  // Directory holding {category}.tsv files.
  std::filesystem::path webchild;
  std::filesystem::path atomic;
  // Empty means "build from the training set".
  std::filesystem::path vocab;
  // Empty means "<out>/index.json".
  std::filesystem::path index;
  // Empty means "<out>/model.ckpt.json".
  std::filesystem::path checkpoint;
};

struct GridSpec {
  // An empty list keeps the base configuration's value.
  std::vector<int> batch_size;
  std::vector<double> learning_rate;
  std::vector<double> warmup;
  std::vector<int> epochs;
  std::size_t budget = 16;
  // Grid points trained concurrently; 1 runs them in order.
  int jobs = 1;

  std::size_t size() const;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  PathConfig paths;
  std::size_t vocab_top_words = 1000;
  EncoderConfig encoder;
  FusionConfig fusion;
  TrainConfig train;
  GridSpec grid;
  SyntheticSpec synthetic;

  // Dotted-name view, e.g. "train.learning_rate".
  std::string to_json() const;
  static RunConfig from_json(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  std::filesystem::path index_path() const;
  std::filesystem::path checkpoint_path() const;
};

// Full-scale fine-tuning hyperparameters (lr 1e-5, 4 epochs, batch 32, 20%
// warmup) on top of the defaults.
RunConfig full_scale_profile();

// Flattened "a.b" -> JSON-encoded default value, for flag generation.
std::map<std::string, std::string> config_flag_defaults();
// Applies one dotted override; the value is parsed as the default's type.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Writes to `<path>.partial` and renames on success.
void write_artifact(const std::filesystem::path& path, const std::string& content);

// Each command throws ConfigError, DataError or TrainingDiverged.
VocabIndex cmd_build_index(const RunConfig& config, std::ostream& log);
// Writes <out>/vocab.txt and <out>/lm/epoch_<e>.jsonl for each LM epoch.
// With `epoch` set, writes only that epoch's examples to the file <out>.
void cmd_preprocess(const RunConfig& config, std::ostream& log, std::optional<int> epoch = std::nullopt);
TrainResult cmd_train(const RunConfig& config, std::ostream& log);
EvalReport cmd_eval(const RunConfig& config, std::ostream& log);
EvalReport cmd_pipeline(const RunConfig& config, std::ostream& log);
// Rows sorted by overall accuracy, descending. Returns the CSV text.
std::string cmd_tune(const RunConfig& config, std::ostream& log);
SyntheticSet cmd_gen_synthetic(const RunConfig& config, std::ostream& log);

// Debug aids over standard streams.
void cmd_stem(std::istream& in, std::ostream& out);
// Whitespace-separated coarse and fine tokens; prints the JSON alignment.
void cmd_align(const std::filesystem::path& coarse, const std::filesystem::path& fine, std::ostream& out);

}  // namespace kgfuse
