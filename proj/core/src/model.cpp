#include "kgfuse/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "kgfuse/error.hpp"
#include "kgfuse/realign.hpp"

namespace kgfuse {

namespace {

using ag::Matrix;
using ag::Parameter;
using ag::Var;

constexpr int kCheckpointVersion = 1;
constexpr double kEmbeddingInitStd = 0.02;

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = stddev * rng.normal();
  }
  return m;
}

LinearParams make_linear(const std::string& name, int in, int out, Rng& rng, double stddev = -1.0) {
  if (stddev < 0.0) stddev = 1.0 / std::sqrt(static_cast<double>(in));
  return {Parameter(name + ".w", normal_matrix(in, out, stddev, rng)),
          Parameter(name + ".b", Matrix::Zero(1, out), false)};
}

NormParams make_norm(const std::string& name, int width) {
  return {Parameter(name + ".gain", Matrix::Ones(1, width), false),
          Parameter(name + ".bias", Matrix::Zero(1, width), false)};
}

AttentionParams make_attention(const std::string& name, int width, Rng& rng) {
  return {make_linear(name + ".q", width, width, rng), make_linear(name + ".k", width, width, rng),
          make_linear(name + ".v", width, width, rng), make_linear(name + ".o", width, width, rng)};
}

Var linear(ag::Tape& tape, Var x, LinearParams& p) {
  return ag::add_row(ag::matmul(x, tape.param(p.w)), tape.param(p.b));
}

Var norm(ag::Tape& tape, Var x, NormParams& p) {
  return ag::layer_norm(x, tape.param(p.gain), tape.param(p.bias));
}

// Multi-head scaled dot-product self-attention; `mask` is additive
// (rows x rows) or empty.
Var self_attention(ag::Tape& tape, Var x, AttentionParams& p, int heads, const Matrix& mask,
                   std::vector<Matrix>* weights) {
  const Eigen::Index width = x->cols();
  const Eigen::Index head_width = width / heads;
  Var q = linear(tape, x, p.q);
  Var k = linear(tape, x, p.k);
  Var v = linear(tape, x, p.v);
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_width));
  std::vector<Var> outputs;
  outputs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const Eigen::Index at = h * head_width;
    Var scores = ag::scale(ag::matmul_nt(ag::cols(q, at, head_width), ag::cols(k, at, head_width)), scale);
    if (mask.size() != 0) scores = ag::add_constant(scores, mask);
    Var probs = ag::softmax_rows(scores);
    if (weights) weights->push_back(probs->value());
    outputs.push_back(ag::matmul(probs, ag::cols(v, at, head_width)));
  }
  return linear(tape, ag::concat_cols(outputs), p.o);
}

void put_matrix(nlohmann::json& dst, const Matrix& m) {
  std::vector<double> data(static_cast<std::size_t>(m.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data.data(), m.rows(), m.cols()) = m;
  dst = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix get_matrix(const nlohmann::json& src) {
  const auto rows = src.at("rows").get<Eigen::Index>();
  const auto cols = src.at("cols").get<Eigen::Index>();
  const auto data = src.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw DataError("checkpoint: matrix size mismatch");
  Matrix m(rows, cols);
  m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(data.data(), rows,
                                                                                              cols);
  return m;
}

nlohmann::json encoder_to_json(const EncoderConfig& e) {
  return {{"layers", e.layers},     {"width", e.width},     {"heads", e.heads},
          {"ff_width", e.ff_width}, {"max_len", e.max_len}, {"vocab_size", e.vocab_size}};
}

nlohmann::json fusion_to_json(const FusionConfig& f) {
  return {{"conceptnet", f.kb_enabled[0]},
          {"webchild", f.kb_enabled[1]},
          {"atomic", f.kb_enabled[2]},
          {"reattention", f.reattention},
          {"reattention_width", f.reattention_width},
          {"reattention_heads", f.reattention_heads}};
}

}  // namespace

void EncoderConfig::validate_shape() const {
  if (layers < 1) throw ConfigError("encoder.layers must be positive");
  if (width < 1 || heads < 1 || width % heads != 0) throw ConfigError("encoder.width must be divisible by encoder.heads");
  if (ff_width < 1) throw ConfigError("encoder.ff_width must be positive");
  if (max_len < 8) throw ConfigError("encoder.max_len must be at least 8");
}

void EncoderConfig::validate() const {
  validate_shape();
  if (vocab_size <= SubwordVocab::kNumSpecial) throw ConfigError("encoder.vocab_size must exceed the reserved markers");
}

int ModelConfig::reattention_width() const {
  return fusion.reattention_width > 0 ? fusion.reattention_width : encoder.width;
}

int ModelConfig::reattention_heads() const {
  return fusion.reattention_heads > 0 ? fusion.reattention_heads : encoder.heads;
}

PreparedPrompt prepare_prompt(const Prompt& prompt, const SubwordVocab& vocab, const VocabIndex* index,
                              std::size_t max_len) {
  PreparedPrompt out;
  out.gold = prompt.gold;
  out.qtype = prompt.qtype;
  for (std::size_t a = 0; a < 2; ++a) {
    auto assembled = assemble_sequence(prompt.passage, prompt.question, prompt.answers[a], vocab, max_len);
    PreparedView& view = out.views[a];
    view.seq = std::move(assembled.seq);
    view.matches.assign(view.seq.size(), {});
    if (index == nullptr || index->triples().empty()) continue;

    const MatchIndex coarse_matches = match_prompt(assembled.words, *index);
    if (coarse_matches.empty()) continue;

    // Words cut by truncation (wholly or partly) take no part in alignment.
    const auto full = subword_tokenize(assembled.words, vocab);
    std::vector<int> full_count(assembled.words.size(), 0);
    for (int w : full.word_index) ++full_count[static_cast<std::size_t>(w)];
    std::vector<int> present(assembled.words.size(), 0);
    for (int w : view.seq.word_index) {
      if (w >= 0) ++present[static_cast<std::size_t>(w)];
    }

    std::vector<std::string> coarse;
    std::vector<std::size_t> coarse_word;
    std::vector<int> sub_of_word(assembled.words.size(), -1);
    for (std::size_t w = 0; w < assembled.words.size(); ++w) {
      if (present[w] == 0 || present[w] != full_count[w]) continue;
      sub_of_word[w] = static_cast<int>(coarse.size());
      coarse.push_back(assembled.words[w]);
      coarse_word.push_back(w);
    }
    std::vector<std::string> fine;
    std::vector<int> fine_word;
    std::vector<std::size_t> fine_pos;
    for (std::size_t t = 0; t < view.seq.size(); ++t) {
      const int w = view.seq.word_index[t];
      if (w < 0 || sub_of_word[static_cast<std::size_t>(w)] < 0) continue;
      fine.push_back(vocab.token(view.seq.ids[t]));
      fine_word.push_back(sub_of_word[static_cast<std::size_t>(w)]);
      fine_pos.push_back(t);
    }
    const auto alignment = token_realignment(coarse, fine, fine_word);

    MatchIndex kept;
    for (const auto& [pos, matches] : coarse_matches) {
      const int sub = sub_of_word[pos];
      if (sub >= 0 && alignment.map.contains(static_cast<std::size_t>(sub))) {
        kept[static_cast<std::size_t>(sub)] = matches;
      }
    }
    for (const auto& [fine_idx, matches] : project_matches(kept, alignment)) {
      view.matches[fine_pos[fine_idx]] = matches;
    }
  }
  return out;
}

std::vector<PreparedPrompt> prepare_prompts(std::span<const Prompt> prompts, const SubwordVocab& vocab,
                                            const VocabIndex* index, std::size_t max_len) {
  std::vector<PreparedPrompt> out;
  out.reserve(prompts.size());
  for (const auto& p : prompts) out.push_back(prepare_prompt(p, vocab, index, max_len));
  return out;
}

Model::Model(ModelConfig config, const RelationIndex& relations, std::uint64_t seed)
    : config_(std::move(config)), relations_(relations) {
  config_.encoder.validate();
  const auto& enc = config_.encoder;
  const int rw = config_.reattention_width();
  const int rh = config_.reattention_heads();
  if (rw % rh != 0) throw ConfigError("reattention width must be divisible by reattention heads");

  Rng rng(seed);
  token_embedding_ = Parameter("embeddings.token", normal_matrix(enc.vocab_size, enc.width, kEmbeddingInitStd, rng));
  position_embedding_ =
      Parameter("embeddings.position", normal_matrix(enc.max_len, enc.width, kEmbeddingInitStd, rng));
  segment_embedding_ = Parameter("embeddings.segment", normal_matrix(2, enc.width, kEmbeddingInitStd, rng));
  ln_embedding_ = make_norm("embeddings.norm", enc.width);
  layers_.reserve(static_cast<std::size_t>(enc.layers));
  for (int l = 0; l < enc.layers; ++l) {
    const std::string name = "encoder." + std::to_string(l);
    layers_.push_back({make_norm(name + ".ln_attn", enc.width), make_attention(name + ".attn", enc.width, rng),
                       make_norm(name + ".ln_ff", enc.width), make_linear(name + ".ff_in", enc.width, enc.ff_width, rng),
                       make_linear(name + ".ff_out", enc.ff_width, enc.width, rng)});
  }
  mlm_transform_ = make_linear("mlm.transform", enc.width, enc.width, rng);
  mlm_norm_ = make_norm("mlm.norm", enc.width);
  mlm_bias_ = Parameter("mlm.bias", Matrix::Zero(1, enc.vocab_size), false);
  nsp_pool_ = make_linear("nsp.pool", enc.width, enc.width, rng);
  nsp_out_ = make_linear("nsp.out", enc.width, 1, rng, kEmbeddingInitStd);

  const KnowledgeTables tables = init_tables(relations_, rng);
  for (auto kb : kAllKnowledgeBases) {
    knowledge_[static_cast<std::size_t>(kb)] = Parameter("knowledge." + std::string(to_string(kb)), tables[kb]);
  }

  reattn_in_ = make_linear("reattention.in", config_.fused_width(), rw, rng);
  reattn_ = make_attention("reattention.attn", rw, rng);
  reattn_norm_ = make_norm("reattention.norm", rw);
  classifier_ = make_linear("classifier", rw, 1, rng, kEmbeddingInitStd);
  fused_classifier_ = make_linear("fused_classifier", config_.fused_width(), 1, rng, kEmbeddingInitStd);
}

std::vector<ag::Parameter*> Model::parameters() {
  std::vector<Parameter*> out = {&token_embedding_, &position_embedding_, &segment_embedding_, &ln_embedding_.gain,
                                 &ln_embedding_.bias};
  auto add_linear = [&out](LinearParams& p) {
    out.push_back(&p.w);
    out.push_back(&p.b);
  };
  auto add_norm = [&out](NormParams& p) {
    out.push_back(&p.gain);
    out.push_back(&p.bias);
  };
  auto add_attention = [&](AttentionParams& p) {
    add_linear(p.q);
    add_linear(p.k);
    add_linear(p.v);
    add_linear(p.o);
  };
  for (auto& l : layers_) {
    add_norm(l.ln_attn);
    add_attention(l.attn);
    add_norm(l.ln_ff);
    add_linear(l.ff_in);
    add_linear(l.ff_out);
  }
  add_linear(mlm_transform_);
  add_norm(mlm_norm_);
  out.push_back(&mlm_bias_);
  add_linear(nsp_pool_);
  add_linear(nsp_out_);
  for (auto& k : knowledge_) out.push_back(&k);
  add_linear(reattn_in_);
  add_attention(reattn_);
  add_norm(reattn_norm_);
  add_linear(classifier_);
  add_linear(fused_classifier_);
  return out;
}

std::vector<ag::Parameter*> Model::trainable_parameters() {
  std::vector<Parameter*> out;
  const bool reattention = config_.fusion.reattention;
  for (Parameter* p : parameters()) {
    const std::string& n = p->name;
    if (n.starts_with("knowledge.")) {
      const auto kb = knowledge_base_from_string(n.substr(std::string("knowledge.").size()));
      if (!config_.fusion.kb_enabled[static_cast<std::size_t>(kb)]) continue;
    }
    if (!reattention && (n.starts_with("reattention.") || n.starts_with("classifier."))) continue;
    if (reattention && n.starts_with("fused_classifier.")) continue;
    out.push_back(p);
  }
  return out;
}

KnowledgeTables Model::knowledge_tables() const {
  KnowledgeTables t;
  for (std::size_t k = 0; k < kNumKnowledgeBases; ++k) t.tables[k] = knowledge_[k].value;
  return t;
}

ag::Var Model::embed(ag::Tape& tape, const TokenSequence& seq, std::span<const int> positions) {
  const int n = static_cast<int>(seq.size());
  if (n > config_.encoder.max_len) {
    throw DataError("sequence length " + std::to_string(n) + " exceeds max_len " +
                    std::to_string(config_.encoder.max_len));
  }
  for (int id : seq.ids) {
    if (id < 0 || id >= config_.encoder.vocab_size) throw DataError("token id out of vocabulary range");
  }
  std::vector<int> pos(positions.begin(), positions.end());
  if (pos.empty()) {
    pos.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = i;
  }
  if (static_cast<int>(pos.size()) != n) throw DataError("position id count differs from sequence length");
  std::vector<int> segments = seq.segments;
  if (segments.empty()) segments.assign(static_cast<std::size_t>(n), 0);
  std::array<Var, 3> parts = {ag::gather_rows(tape.param(token_embedding_), seq.ids),
                              ag::gather_rows(tape.param(position_embedding_), pos),
                              ag::gather_rows(tape.param(segment_embedding_), segments)};
  return norm(tape, ag::sum(parts), ln_embedding_);
}

std::vector<ag::Var> Model::encode(ag::Tape& tape, const TokenSequence& seq, std::span<const int> positions) {
  Var h = embed(tape, seq, positions);
  std::vector<Var> outputs;
  outputs.reserve(layers_.size());
  static const Matrix kNoMask;
  for (auto& layer : layers_) {
    Var attn = self_attention(tape, norm(tape, h, layer.ln_attn), layer.attn, config_.encoder.heads, kNoMask, nullptr);
    h = ag::add(h, attn);
    Var ff = linear(tape, ag::gelu(linear(tape, norm(tape, h, layer.ln_ff), layer.ff_in)), layer.ff_out);
    h = ag::add(h, ff);
    outputs.push_back(h);
  }
  return outputs;
}

LmLosses Model::lm_losses(ag::Tape& tape, const MaskedExample& example) {
  const auto layers = encode(tape, example.seq);
  Var top = layers.back();
  LmLosses out;
  if (example.mask_positions.empty()) {
    out.mlm = tape.constant(Matrix::Zero(1, 1));
  } else {
    Var picked = ag::gather_rows(top, example.mask_positions);
    Var t = norm(tape, ag::gelu(linear(tape, picked, mlm_transform_)), mlm_norm_);
    Var logits = ag::add_row(ag::matmul_nt(t, tape.param(token_embedding_)), tape.param(mlm_bias_));
    out.mlm = ag::cross_entropy(logits, example.original_ids);
  }
  if (example.nsp) {
    const std::array<int, 1> cls = {0};
    Var pooled = ag::tanh(linear(tape, ag::gather_rows(top, cls), nsp_pool_));
    const std::array<int, 1> label = {*example.nsp == NspLabel::kIsNext ? 1 : 0};
    out.nsp = ag::binary_cross_entropy(linear(tape, pooled, nsp_out_), label);
  }
  return out;
}

ReAttentionResult Model::re_attention(ag::Tape& tape, ag::Var fused, std::span<const char> key_valid) {
  if (fused->cols() != config_.fused_width()) {
    throw DataError("re-attention input width " + std::to_string(fused->cols()) + " differs from " +
                    std::to_string(config_.fused_width()));
  }
  Matrix mask;
  if (!key_valid.empty()) {
    if (static_cast<Eigen::Index>(key_valid.size()) != fused->rows()) throw DataError("key mask length mismatch");
    mask = Matrix::Zero(fused->rows(), fused->rows());
    for (std::size_t k = 0; k < key_valid.size(); ++k) {
      if (!key_valid[k]) mask.col(static_cast<Eigen::Index>(k)).setConstant(-std::numeric_limits<double>::infinity());
    }
  }
  ReAttentionResult out;
  Var x = linear(tape, fused, reattn_in_);
  Var attn = self_attention(tape, x, reattn_, config_.reattention_heads(), mask, &out.weights);
  out.output = norm(tape, ag::add(x, attn), reattn_norm_);
  return out;
}

ViewForward Model::forward_view(ag::Tape& tape, const PreparedView& view, Rng& rng) {
  ViewForward out;
  const auto layers = encode(tape, view.seq);
  const std::size_t first = layers.size() > 4 ? layers.size() - 4 : 0;
  Var context = ag::sum(std::span(layers).subspan(first));

  const auto n = static_cast<Eigen::Index>(view.seq.size());
  std::array<std::size_t, kNumKnowledgeBases> rows{};
  for (std::size_t k = 0; k < kNumKnowledgeBases; ++k) rows[k] = static_cast<std::size_t>(knowledge_[k].value.rows());
  out.graph.assign(static_cast<std::size_t>(n), GraphChoice{-1, -1, -1});
  std::array<std::vector<int>, kNumKnowledgeBases> picks;
  for (auto& p : picks) p.assign(static_cast<std::size_t>(n), -1);
  bool any = false;
  std::vector<Match> enabled;
  for (std::size_t t = 0; t < view.matches.size() && t < static_cast<std::size_t>(n); ++t) {
    if (view.matches[t].empty()) continue;
    enabled.clear();
    for (const auto& m : view.matches[t]) {
      if (config_.fusion.kb_enabled[static_cast<std::size_t>(m.kb)]) enabled.push_back(m);
    }
    if (enabled.empty()) continue;
    out.graph[t] = choose_relations(enabled, rows, rng);
    for (std::size_t k = 0; k < kNumKnowledgeBases; ++k) {
      picks[k][t] = out.graph[t][k];
      any = any || picks[k][t] >= 0;
    }
  }
  Var graph;
  if (any) {
    std::array<Var, kNumKnowledgeBases> slices;
    for (std::size_t k = 0; k < kNumKnowledgeBases; ++k) {
      slices[k] = ag::gather_rows(tape.param(knowledge_[k]), picks[k]);
    }
    graph = ag::concat_cols(slices);
  } else {
    graph = tape.constant(Matrix::Zero(n, kGraphWidth));
  }
  out.fused = ag::dyadic_rows(context, graph);

  const std::array<int, 1> cls = {0};
  if (config_.fusion.reattention) {
    auto attended = re_attention(tape, out.fused);
    out.score = linear(tape, ag::gather_rows(attended.output, cls), classifier_);
  } else {
    out.score = linear(tape, ag::gather_rows(out.fused, cls), fused_classifier_);
  }
  return out;
}

ClassifyResult Model::classify(ag::Tape& tape, const PreparedPrompt& prompt, Rng& rng) {
  ClassifyResult out;
  out.views[0] = forward_view(tape, prompt.views[0], rng);
  out.views[1] = forward_view(tape, prompt.views[1], rng);
  const std::array<Var, 2> scores = {out.views[0].score, out.views[1].score};
  out.scores = ag::concat_cols(scores);
  const Eigen::RowVector2d s = out.scores->value().row(0);
  const double m = s.maxCoeff();
  Eigen::Vector2d e((s(0) - m), (s(1) - m));
  e = e.array().exp();
  out.probabilities = e / e.sum();
  return out;
}

Eigen::Vector2d Model::predict(const PreparedPrompt& prompt, std::uint64_t seed) {
  ag::Tape tape;
  Rng rng(seed);
  return classify(tape, prompt, rng).probabilities;
}

void Model::save(const std::filesystem::path& path, const std::string& train_config_json,
                 const std::vector<std::string>& vocab, const Rng& rng, long step) const {
  nlohmann::ordered_json doc;
  doc["format"] = "kgfuse-checkpoint";
  doc["version"] = kCheckpointVersion;
  doc["encoder"] = encoder_to_json(config_.encoder);
  doc["fusion"] = fusion_to_json(config_.fusion);
  doc["train"] = nlohmann::json::parse(train_config_json.empty() ? "{}" : train_config_json);
  doc["vocab"] = vocab;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (Parameter* p : const_cast<Model*>(this)->parameters()) {
    if (p->name.starts_with("knowledge.")) continue;
    nlohmann::json m;
    put_matrix(m, p->value);
    params[p->name] = std::move(m);
  }
  doc["parameters"] = std::move(params);
  nlohmann::ordered_json knowledge = nlohmann::ordered_json::object();
  for (auto kb : kAllKnowledgeBases) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::object();
    const auto& table = knowledge_[static_cast<std::size_t>(kb)].value;
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
      std::vector<double> row(table.cols());
      for (Eigen::Index c = 0; c < table.cols(); ++c) row[static_cast<std::size_t>(c)] = table(r, c);
      rows[relations_.label(kb, static_cast<int>(r))] = row;
    }
    knowledge[std::string(to_string(kb))] = std::move(rows);
  }
  doc["knowledge"] = std::move(knowledge);
  doc["rng"] = rng.serialize();
  doc["step"] = step;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump() << "\n";
}

Model::Loaded Model::load(const std::filesystem::path& path, const RelationIndex& relations) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
    if (doc.at("format") != "kgfuse-checkpoint" || doc.at("version").get<int>() != kCheckpointVersion) {
      throw DataError(path.string() + ": not a supported checkpoint");
    }
    ModelConfig cfg;
    const auto& e = doc.at("encoder");
    cfg.encoder = {e.at("layers"), e.at("width"), e.at("heads"), e.at("ff_width"), e.at("max_len"), e.at("vocab_size")};
    const auto& f = doc.at("fusion");
    cfg.fusion.kb_enabled = {f.at("conceptnet").get<bool>(), f.at("webchild").get<bool>(), f.at("atomic").get<bool>()};
    cfg.fusion.reattention = f.at("reattention");
    cfg.fusion.reattention_width = f.at("reattention_width");
    cfg.fusion.reattention_heads = f.at("reattention_heads");

    Model model(cfg, relations, 0);
    const auto& params = doc.at("parameters");
    for (Parameter* p : model.parameters()) {
      if (p->name.starts_with("knowledge.")) continue;
      Matrix m = get_matrix(params.at(p->name));
      if (m.rows() != p->value.rows() || m.cols() != p->value.cols()) {
        throw DataError(path.string() + ": shape mismatch for " + p->name);
      }
      p->value = std::move(m);
    }
    // Rows are matched by relation label; labels absent from the checkpoint
    // start at zero.
    for (auto kb : kAllKnowledgeBases) {
      auto& table = model.knowledge_table(kb).value;
      table.setZero();
      const auto& stored = doc.at("knowledge").at(std::string(to_string(kb)));
      for (Eigen::Index r = 0; r < table.rows(); ++r) {
        const auto& label = relations.label(kb, static_cast<int>(r));
        if (!stored.contains(label)) continue;
        const auto row = stored.at(label).get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != table.cols()) throw DataError("checkpoint: bad knowledge row");
        for (Eigen::Index c = 0; c < table.cols(); ++c) table(r, c) = row[static_cast<std::size_t>(c)];
      }
    }
    Loaded out{std::move(model), doc.at("train").dump(), doc.at("vocab").get<std::vector<std::string>>(),
               doc.at("rng").get<std::string>(), doc.at("step").get<long>()};
    return out;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(path.string() + ": " + ex.what());
  }
}

}  // namespace kgfuse
