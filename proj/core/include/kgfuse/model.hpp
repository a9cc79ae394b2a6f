#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgfuse/autograd.hpp"
#include "kgfuse/corpus.hpp"
#include "kgfuse/fusion.hpp"
#include "kgfuse/kb.hpp"
#include "kgfuse/lm_prep.hpp"
#include "kgfuse/random.hpp"

namespace kgfuse {

struct EncoderConfig {
  int layers = 2;
  int width = 32;
  int heads = 2;
  int ff_width = 64;
  int max_len = static_cast<int>(kDefaultMaxSequenceLength);
  int vocab_size = 0;

  // Everything except vocab_size, which is only known once a vocab exists.
  void validate_shape() const;
  void validate() const;
};

struct FusionConfig {
  std::array<bool, kNumKnowledgeBases> kb_enabled = {true, true, true};
  // Single self-attention layer over fused tokens before classification.
  bool reattention = true;
  // 0 means "same as the encoder".
  int reattention_width = 0;
  int reattention_heads = 0;

  bool any_kb() const { return kb_enabled[0] || kb_enabled[1] || kb_enabled[2]; }
};

struct ModelConfig {
  EncoderConfig encoder;
  FusionConfig fusion;

  int reattention_width() const;
  int reattention_heads() const;
  int fused_width() const { return encoder.width * (kGraphWidth + 1); }
};

// One answer's view of a prompt, ready for the forward pass.
struct PreparedView {
  TokenSequence seq;
  // KB matches per sequence position (already projected onto subwords).
  std::vector<std::vector<Match>> matches;
};

struct PreparedPrompt {
  std::array<PreparedView, 2> views;
  std::optional<int> gold;
  QuestionType qtype = QuestionType::kOther;
};

// Assembles both answer sequences, matches the KB index over word-level
// tokens, realigns onto subwords and attaches matches to first pieces.
// Without an index the match lists are empty.
PreparedPrompt prepare_prompt(const Prompt& prompt, const SubwordVocab& vocab, const VocabIndex* index,
                              std::size_t max_len);
std::vector<PreparedPrompt> prepare_prompts(std::span<const Prompt> prompts, const SubwordVocab& vocab,
                                            const VocabIndex* index, std::size_t max_len);

struct LinearParams {
  ag::Parameter w;
  ag::Parameter b;
};

struct NormParams {
  ag::Parameter gain;
  ag::Parameter bias;
};

struct AttentionParams {
  LinearParams q, k, v, o;
};

struct EncoderLayerParams {
  NormParams ln_attn;
  AttentionParams attn;
  NormParams ln_ff;
  LinearParams ff_in;
  LinearParams ff_out;
};

struct LmLosses {
  ag::Var mlm = nullptr;
  // Null when the example carries no NSP label.
  ag::Var nsp = nullptr;
};

struct ReAttentionResult {
  ag::Var output = nullptr;
  // Attention weights per head (query rows, key columns).
  std::vector<Eigen::MatrixXd> weights;
};

struct ViewForward {
  ag::Var score = nullptr;
  ag::Var fused = nullptr;
  // Relation picked per KB at each position (-1 when none).
  std::vector<GraphChoice> graph;
};

struct ClassifyResult {
  ag::Var scores = nullptr;  // 1 x 2
  Eigen::Vector2d probabilities;
  std::array<ViewForward, 2> views;
};

// Encoder stand-in, LM heads, knowledge tables, re-attention and choice
// classifier. Every block is trainable.
class Model {
 public:
  Model(ModelConfig config, const RelationIndex& relations, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const RelationIndex& relations() const { return relations_; }

  // Per-layer outputs, each (seq_len x width). Positions default to 0..n-1.
  std::vector<ag::Var> encode(ag::Tape& tape, const TokenSequence& seq, std::span<const int> positions = {});

  LmLosses lm_losses(ag::Tape& tape, const MaskedExample& example);

  // Projects fused tokens to the re-attention width, then one multi-head
  // self-attention block with residual and normalization. Keys whose
  // `key_valid` flag is 0 receive no attention.
  ReAttentionResult re_attention(ag::Tape& tape, ag::Var fused, std::span<const char> key_valid = {});

  ViewForward forward_view(ag::Tape& tape, const PreparedView& view, Rng& rng);
  ClassifyResult classify(ag::Tape& tape, const PreparedPrompt& prompt, Rng& rng);
  // Inference-only convenience; graph choices drawn from `seed`.
  Eigen::Vector2d predict(const PreparedPrompt& prompt, std::uint64_t seed);

  // Every parameter block, in a fixed order.
  std::vector<ag::Parameter*> parameters();
  // Blocks on the configured forward path (disabled KB tables and the
  // unused classifier branch are excluded).
  std::vector<ag::Parameter*> trainable_parameters();

  ag::Parameter& knowledge_table(KnowledgeBase kb) { return knowledge_[static_cast<std::size_t>(kb)]; }
  KnowledgeTables knowledge_tables() const;

  // Versioned JSON container. Knowledge rows are keyed by relation label.
  void save(const std::filesystem::path& path, const std::string& train_config_json, const std::vector<std::string>& vocab,
            const Rng& rng, long step) const;
  struct Loaded;
  static Loaded load(const std::filesystem::path& path, const RelationIndex& relations);

 private:
  ag::Var embed(ag::Tape& tape, const TokenSequence& seq, std::span<const int> positions);

  ModelConfig config_;
  RelationIndex relations_;

  ag::Parameter token_embedding_;
  ag::Parameter position_embedding_;
  ag::Parameter segment_embedding_;
  NormParams ln_embedding_;
  std::vector<EncoderLayerParams> layers_;

  LinearParams mlm_transform_;
  NormParams mlm_norm_;
  ag::Parameter mlm_bias_;
  LinearParams nsp_pool_;
  LinearParams nsp_out_;

  std::array<ag::Parameter, kNumKnowledgeBases> knowledge_;

  LinearParams reattn_in_;
  AttentionParams reattn_;
  NormParams reattn_norm_;
  LinearParams classifier_;
  // Used when re-attention is disabled: scores the fused CLS token.
  LinearParams fused_classifier_;
};

struct Model::Loaded {
  Model model;
  std::string train_config_json;
  std::vector<std::string> vocab;
  std::string rng_state;
  long step = 0;
};

}  // namespace kgfuse
