#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgfuse/autograd.hpp"
#include "kgfuse/corpus.hpp"
#include "kgfuse/lm_prep.hpp"
#include "kgfuse/model.hpp"

namespace kgfuse {

enum class TrainMode { kSequential, kJoint };

std::string_view to_string(TrainMode mode);
TrainMode train_mode_from_string(std::string_view name);
std::string_view to_string(LmOrder order);
LmOrder lm_order_from_string(std::string_view name);

struct TrainConfig {
  int batch_size = 32;
  double learning_rate = 3e-4;
  // Classification epochs.
  int epochs = 4;
  // Language-model epochs run before classification (sequential mode).
  int lm_epochs = 1;
  double warmup = 0.2;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // Global gradient-norm ceiling; 0 disables clipping.
  double max_grad_norm = 1.0;
  double mask_prob = kMaskProbability;
  TrainMode mode = TrainMode::kSequential;
  LmOrder lm_order = LmOrder::kPairThenMask;
  std::uint64_t seed = 0;

  void validate() const;
};

// Linear warmup from 0 over ceil(warmup * total) steps, then linear decay
// to 0 at `total`.
class WarmupLinearSchedule {
 public:
  WarmupLinearSchedule(double peak, long total_steps, double warmup_fraction);

  double operator()(long step) const;
  long warmup_steps() const { return warmup_steps_; }
  long total_steps() const { return total_; }

 private:
  double peak_;
  long total_;
  long warmup_steps_;
};

// Adam with decoupled weight decay; blocks whose `decay` flag is false are
// not decayed.
class AdamW {
 public:
  explicit AdamW(const TrainConfig& config);

  void step(std::span<ag::Parameter* const> params, double lr);
  long steps() const { return t_; }

 private:
  double beta1_;
  double beta2_;
  double eps_;
  double weight_decay_;
  long t_ = 0;
};

// Scales gradients so their global L2 norm is at most `max_norm`. Returns
// the norm before clipping.
double clip_gradients(std::span<ag::Parameter* const> params, double max_norm);

struct MetricsRow {
  long step = 0;
  double lr = 0.0;
  std::optional<double> loss_mlm;
  std::optional<double> loss_nsp;
  std::optional<double> loss_cls;
  std::optional<double> dev_accuracy;
};

std::string metrics_csv(std::span<const MetricsRow> rows);

struct TypeTally {
  std::size_t correct = 0;
  std::size_t n = 0;
};

struct EvalReport {
  double overall = 0.0;
  std::size_t correct = 0;
  std::size_t n = 0;
  std::map<QuestionType, TypeTally> per_type;

  double type_accuracy(QuestionType t) const;
  std::string to_json() const;
  std::string to_csv() const;
};

// Argmax of each probability pair against gold (ties go to answer 0).
// Throws DataError on an unlabeled prompt.
EvalReport tally(std::span<const PreparedPrompt> prompts, std::span<const Eigen::Vector2d> probabilities);

// Graph choices for prompt i are drawn from derive_seed(seed, i).
EvalReport evaluate(Model& model, std::span<const PreparedPrompt> prompts, std::uint64_t seed);

struct TrainData {
  // Raw prompts feed per-epoch LM regeneration.
  std::span<const Prompt> prompts;
  std::span<const PreparedPrompt> prepared;
  std::span<const PreparedPrompt> dev;
  const SubwordVocab* vocab = nullptr;
};

struct TrainResult {
  std::vector<MetricsRow> history;
  long steps = 0;
  Rng rng;
};

using ProgressFn = std::function<void(const MetricsRow&)>;

// LM fine-tuning (MLM + NSP) for lm_epochs, then classification
// fine-tuning for epochs, each phase on its own warmup schedule. Joint mode
// sums all three losses on one schedule. Throws TrainingDiverged on a
// non-finite loss or parameter.
TrainResult train(Model& model, const TrainData& data, const TrainConfig& config, const ProgressFn& progress = {});

}  // namespace kgfuse
