#pragma once

// Small end-to-end training setups built from the synthetic generator.

#include <memory>

#include "kgfuse/model.hpp"
#include "kgfuse/synthetic.hpp"
#include "kgfuse/train.hpp"

namespace kgfuse::testing {

struct Setup {
  SyntheticSet set;
  std::vector<Prompt> train;
  std::vector<Prompt> dev;
  SubwordVocab vocab;
  VocabIndex index;
  std::vector<PreparedPrompt> prepared;
  std::vector<PreparedPrompt> prepared_dev;

  TrainData data() const { return {train, prepared, prepared_dev, &vocab}; }
};

inline std::unique_ptr<Setup> make_setup(std::size_t n_train, std::size_t n_dev, bool planted, std::uint64_t seed = 0,
                                         std::size_t max_len = 96) {
  auto s = std::make_unique<Setup>();
  SyntheticSpec spec;
  spec.n_train = n_train;
  spec.n_dev = n_dev;
  spec.seed = seed;
  s->set = generate_synthetic(spec);
  s->train = planted ? s->set.planted_train : s->set.plain_train;
  s->dev = planted ? s->set.planted_dev : s->set.plain_dev;
  std::vector<Prompt> all = s->train;
  all.insert(all.end(), s->dev.begin(), s->dev.end());
  s->vocab = SubwordVocab::build_from_corpus(s->train);
  const auto triples = s->set.kb.triples();
  s->index = build_vocab_index(triples, all);
  s->prepared = prepare_prompts(s->train, s->vocab, &s->index, max_len);
  s->prepared_dev = prepare_prompts(s->dev, s->vocab, &s->index, max_len);
  return s;
}

inline ModelConfig small_model(const SubwordVocab& vocab, int width = 8, std::size_t max_len = 96) {
  ModelConfig c;
  c.encoder.layers = 2;
  c.encoder.width = width;
  c.encoder.heads = 2;
  c.encoder.ff_width = 2 * width;
  c.encoder.max_len = static_cast<int>(max_len);
  c.encoder.vocab_size = static_cast<int>(vocab.size());
  return c;
}

}  // namespace kgfuse::testing
