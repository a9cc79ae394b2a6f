#include "kgfuse/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "kgfuse/error.hpp"

namespace kgfuse {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void zero_grads(std::span<ag::Parameter* const> params) {
  for (auto* p : params) p->zero_grad();
}

void check_finite(std::span<ag::Parameter* const> params, long step) {
  for (const auto* p : params) {
    if (!p->value.allFinite()) throw TrainingDiverged("parameter " + p->name + " is not finite", step);
  }
}

void check_loss(double loss, const char* what, long step) {
  if (!std::isfinite(loss)) throw TrainingDiverged(std::string(what) + " loss is not finite", step);
}

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);
  return order;
}

long steps_per_epoch(std::size_t n, int batch) { return static_cast<long>((n + batch - 1) / batch); }

// Stream ids keep the random sources of the two phases apart.
constexpr std::uint64_t kLmStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kGraphStream = 3;
constexpr std::uint64_t kDevStream = 4;

struct Sums {
  double mlm = 0.0;
  double nsp = 0.0;
  double cls = 0.0;
  std::size_t n_lm = 0;
  std::size_t n_nsp = 0;
  std::size_t n_cls = 0;
};

class Runner {
 public:
  Runner(Model& model, const TrainData& data, const TrainConfig& config, const ProgressFn& progress)
      : model_(model),
        data_(data),
        config_(config),
        progress_(progress),
        params_(model.trainable_parameters()),
        optimizer_(config) {}

  TrainResult run() {
    if (config_.mode == TrainMode::kSequential) {
      if (config_.lm_epochs > 0) lm_phase();
      cls_phase(false);
    } else {
      cls_phase(true);
    }
    TrainResult out;
    out.history = std::move(history_);
    out.steps = step_;
    out.rng = Rng(derive_seed(config_.seed, static_cast<std::uint64_t>(step_)));
    return out;
  }

 private:
  std::vector<MaskedExample> lm_examples(int epoch) const {
    LmPrepOptions opts;
    opts.max_len = static_cast<std::size_t>(model_.config().encoder.max_len);
    opts.mask_prob = config_.mask_prob;
    opts.order = config_.lm_order;
    return regenerate_epoch(data_.prompts, *data_.vocab, static_cast<std::uint64_t>(epoch),
                            derive_seed(config_.seed, kLmStream), opts);
  }

  void accumulate_lm(const MaskedExample& ex, double weight, Sums& sums) {
    ag::Tape tape;
    const auto losses = model_.lm_losses(tape, ex);
    std::vector<ag::Var> parts = {losses.mlm};
    sums.mlm += losses.mlm->value()(0, 0);
    ++sums.n_lm;
    if (losses.nsp) {
      parts.push_back(losses.nsp);
      sums.nsp += losses.nsp->value()(0, 0);
      ++sums.n_nsp;
    }
    tape.backward(ag::sum(parts), weight);
  }

  void accumulate_cls(std::size_t index, double weight, Sums& sums) {
    const auto& prompt = data_.prepared[index];
    if (!prompt.gold) throw DataError("training prompt " + std::to_string(index) + " has no gold label");
    Rng rng(derive_seed(derive_seed(derive_seed(config_.seed, kGraphStream), static_cast<std::uint64_t>(step_)),
                        index));
    ag::Tape tape;
    auto result = model_.classify(tape, prompt, rng);
    const std::array<int, 1> target = {*prompt.gold};
    ag::Var loss = ag::cross_entropy(result.scores, target);
    sums.cls += loss->value()(0, 0);
    ++sums.n_cls;
    tape.backward(loss, weight);
  }

  void finish_step(const WarmupLinearSchedule& schedule, long phase_step, const Sums& sums) {
    MetricsRow row;
    row.step = step_;
    row.lr = schedule(phase_step);
    if (sums.n_lm > 0) {
      row.loss_mlm = sums.mlm / static_cast<double>(sums.n_lm);
      check_loss(*row.loss_mlm, "MLM", step_);
    }
    if (sums.n_nsp > 0) {
      row.loss_nsp = sums.nsp / static_cast<double>(sums.n_nsp);
      check_loss(*row.loss_nsp, "NSP", step_);
    }
    if (sums.n_cls > 0) {
      row.loss_cls = sums.cls / static_cast<double>(sums.n_cls);
      check_loss(*row.loss_cls, "classification", step_);
    }
    if (config_.max_grad_norm > 0.0) {
      const double norm = clip_gradients(params_, config_.max_grad_norm);
      if (!std::isfinite(norm)) throw TrainingDiverged("gradient is not finite", step_);
    }
    optimizer_.step(params_, row.lr);
    check_finite(params_, step_);
    history_.push_back(row);
    if (progress_) progress_(row);
    ++step_;
  }

  void lm_phase() {
    const std::size_t n = data_.prompts.size();
    if (n == 0) return;
    const long per_epoch = steps_per_epoch(n, config_.batch_size);
    const WarmupLinearSchedule schedule(config_.learning_rate, per_epoch * config_.lm_epochs, config_.warmup);
    long phase_step = 0;
    for (int epoch = 0; epoch < config_.lm_epochs; ++epoch) {
      const auto examples = lm_examples(epoch);
      Rng order_rng(derive_seed(derive_seed(config_.seed, kShuffleStream), static_cast<std::uint64_t>(step_)));
      const auto order = shuffled(examples.size(), order_rng);
      for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(config_.batch_size)) {
        const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(config_.batch_size));
        zero_grads(params_);
        Sums sums;
        const double weight = 1.0 / static_cast<double>(end - begin);
        for (std::size_t b = begin; b < end; ++b) accumulate_lm(examples[order[b]], weight, sums);
        finish_step(schedule, phase_step++, sums);
      }
    }
  }

  void cls_phase(bool joint) {
    const std::size_t n = data_.prepared.size();
    if (n == 0) return;
    const long per_epoch = steps_per_epoch(n, config_.batch_size);
    const WarmupLinearSchedule schedule(config_.learning_rate, per_epoch * config_.epochs, config_.warmup);
    long phase_step = 0;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
      std::vector<MaskedExample> examples;
      if (joint) {
        examples = lm_examples(epoch);
        if (examples.size() != n) throw DataError("joint training needs raw prompts matching the prepared set");
      }
      Rng order_rng(derive_seed(derive_seed(config_.seed, kShuffleStream), static_cast<std::uint64_t>(step_)));
      const auto order = shuffled(n, order_rng);
      for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(config_.batch_size)) {
        const std::size_t end = std::min(n, begin + static_cast<std::size_t>(config_.batch_size));
        zero_grads(params_);
        Sums sums;
        const double weight = 1.0 / static_cast<double>(end - begin);
        for (std::size_t b = begin; b < end; ++b) {
          accumulate_cls(order[b], weight, sums);
          if (joint) accumulate_lm(examples[order[b]], weight, sums);
        }
        finish_step(schedule, phase_step++, sums);
      }
      if (!data_.dev.empty()) {
        const auto report = evaluate(model_, data_.dev, derive_seed(config_.seed, kDevStream));
        history_.back().dev_accuracy = report.overall;
        if (progress_) progress_(history_.back());
      }
    }
  }

  Model& model_;
  const TrainData& data_;
  const TrainConfig& config_;
  const ProgressFn& progress_;
  std::vector<ag::Parameter*> params_;
  AdamW optimizer_;
  std::vector<MetricsRow> history_;
  long step_ = 0;
};

}  // namespace

std::string_view to_string(TrainMode mode) { return mode == TrainMode::kJoint ? "joint" : "sequential"; }

TrainMode train_mode_from_string(std::string_view name) {
  if (name == "sequential") return TrainMode::kSequential;
  if (name == "joint") return TrainMode::kJoint;
  throw ConfigError("unknown training mode '" + std::string(name) + "'");
}

std::string_view to_string(LmOrder order) {
  return order == LmOrder::kMaskThenPair ? "mask-then-pair" : "pair-then-mask";
}

LmOrder lm_order_from_string(std::string_view name) {
  if (name == "pair-then-mask") return LmOrder::kPairThenMask;
  if (name == "mask-then-pair") return LmOrder::kMaskThenPair;
  throw ConfigError("unknown LM preparation order '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be positive");
  if (epochs < 1) throw ConfigError("train.epochs must be positive");
  if (lm_epochs < 0) throw ConfigError("train.lm_epochs must be non-negative");
  if (!(warmup >= 0.0 && warmup < 1.0)) throw ConfigError("train.warmup must lie in [0, 1)");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train.learning_rate must be finite and non-negative");
  if (!(weight_decay >= 0.0)) throw ConfigError("train.weight_decay must be non-negative");
  if (!(mask_prob >= 0.0 && mask_prob <= 1.0)) throw ConfigError("train.mask_prob must lie in [0, 1]");
  if (!(max_grad_norm >= 0.0)) throw ConfigError("train.max_grad_norm must be non-negative");
}

WarmupLinearSchedule::WarmupLinearSchedule(double peak, long total_steps, double warmup_fraction)
    : peak_(peak),
      total_(total_steps),
      warmup_steps_(static_cast<long>(std::ceil(warmup_fraction * static_cast<double>(total_steps)))) {}

double WarmupLinearSchedule::operator()(long step) const {
  if (step < 0 || step >= total_) return 0.0;
  if (step < warmup_steps_) return peak_ * static_cast<double>(step) / static_cast<double>(warmup_steps_);
  return peak_ * static_cast<double>(total_ - step) / static_cast<double>(total_ - warmup_steps_);
}

AdamW::AdamW(const TrainConfig& config)
    : beta1_(config.beta1), beta2_(config.beta2), eps_(config.adam_eps), weight_decay_(config.weight_decay) {}

void AdamW::step(std::span<ag::Parameter* const> params, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (auto* p : params) {
    if (p->m.size() != p->value.size()) p->m.setZero(p->value.rows(), p->value.cols());
    if (p->v.size() != p->value.size()) p->v.setZero(p->value.rows(), p->value.cols());
    p->m = beta1_ * p->m + (1.0 - beta1_) * p->grad;
    p->v = beta2_ * p->v + (1.0 - beta2_) * p->grad.cwiseAbs2();
    const ag::Matrix update = (p->m / c1).array() / ((p->v / c2).array().sqrt() + eps_);
    if (p->decay && weight_decay_ > 0.0) p->value -= lr * weight_decay_ * p->value;
    p->value -= lr * update;
  }
}

double clip_gradients(std::span<ag::Parameter* const> params, double max_norm) {
  double sq = 0.0;
  for (const auto* p : params) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm && std::isfinite(norm)) {
    const double s = max_norm / norm;
    for (auto* p : params) p->grad *= s;
  }
  return norm;
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::ostringstream out;
  out << "step,lr,loss_mlm,loss_nsp,loss_cls,dev_accuracy\n";
  auto cell = [&out](const std::optional<double>& v) {
    out << ',';
    if (v) out << fmt(*v);
  };
  for (const auto& r : rows) {
    out << r.step << ',' << fmt(r.lr);
    cell(r.loss_mlm);
    cell(r.loss_nsp);
    cell(r.loss_cls);
    cell(r.dev_accuracy);
    out << '\n';
  }
  return out.str();
}

double EvalReport::type_accuracy(QuestionType t) const {
  const auto it = per_type.find(t);
  if (it == per_type.end() || it->second.n == 0) return 0.0;
  return static_cast<double>(it->second.correct) / static_cast<double>(it->second.n);
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["overall"] = overall;
  doc["n"] = n;
  doc["correct"] = correct;
  nlohmann::ordered_json types = nlohmann::ordered_json::object();
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [t, tally] : per_type) {
    types[std::string(to_string(t))] = type_accuracy(t);
    counts[std::string(to_string(t))] = tally.n;
  }
  doc["per_type"] = std::move(types);
  doc["per_type_n"] = std::move(counts);
  return doc.dump(2) + "\n";
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "type,accuracy,correct,n\n";
  for (const auto& [t, tally] : per_type) {
    out << to_string(t) << ',' << fmt(type_accuracy(t)) << ',' << tally.correct << ',' << tally.n << '\n';
  }
  out << "overall," << fmt(overall) << ',' << correct << ',' << n << '\n';
  return out.str();
}

EvalReport tally(std::span<const PreparedPrompt> prompts, std::span<const Eigen::Vector2d> probabilities) {
  if (prompts.size() != probabilities.size()) throw DataError("prediction count differs from prompt count");
  EvalReport report;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (!prompts[i].gold) throw DataError("cannot evaluate: prompt " + std::to_string(i) + " has no gold label");
    const int predicted = probabilities[i](1) > probabilities[i](0) ? 1 : 0;
    auto& t = report.per_type[prompts[i].qtype];
    ++t.n;
    ++report.n;
    if (predicted == *prompts[i].gold) {
      ++t.correct;
      ++report.correct;
    }
  }
  report.overall = report.n == 0 ? 0.0 : static_cast<double>(report.correct) / static_cast<double>(report.n);
  return report;
}

EvalReport evaluate(Model& model, std::span<const PreparedPrompt> prompts, std::uint64_t seed) {
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (!prompts[i].gold) throw DataError("cannot evaluate: prompt " + std::to_string(i) + " has no gold label");
  }
  std::vector<Eigen::Vector2d> probs;
  probs.reserve(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) probs.push_back(model.predict(prompts[i], derive_seed(seed, i)));
  return tally(prompts, probs);
}

TrainResult train(Model& model, const TrainData& data, const TrainConfig& config, const ProgressFn& progress) {
  config.validate();
  if (data.vocab == nullptr && (config.lm_epochs > 0 || config.mode == TrainMode::kJoint)) {
    throw ConfigError("LM fine-tuning needs a subword vocabulary");
  }
  Runner runner(model, data, config, progress);
  return runner.run();
}

}  // namespace kgfuse
