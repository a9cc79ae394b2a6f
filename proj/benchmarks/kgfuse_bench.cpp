#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "kgfuse/kb.hpp"
#include "kgfuse/lm_prep.hpp"
#include "kgfuse/model.hpp"
#include "kgfuse/realign.hpp"
#include "kgfuse/stemmer.hpp"
#include "kgfuse/synthetic.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse {
namespace {

void BM_Stem(benchmark::State& state) {
  Rng rng(1);
  std::vector<std::string> words;
  for (int i = 0; i < 1000; ++i) {
    const auto& w = gen::words()[rng.uniform_int(gen::words().size())];
    if (w != "42") words.push_back(w + "ingly");
  }
  for (auto _ : state) {
    for (const auto& w : words) benchmark::DoNotOptimize(stem(w));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(words.size()));
}
BENCHMARK(BM_Stem);

void BM_BuildVocabIndex(benchmark::State& state) {
  Rng rng(2);
  const auto triples = gen::triples(rng, static_cast<std::size_t>(state.range(0)));
  const auto prompts = gen::prompts(rng, 50);
  for (auto _ : state) benchmark::DoNotOptimize(build_vocab_index(triples, prompts));
}
BENCHMARK(BM_BuildVocabIndex)->Arg(100)->Arg(500)->Arg(2000);

void BM_SubwordTokenize(benchmark::State& state) {
  Rng rng(3);
  const auto words = gen::random_words(rng, 2000);
  Prompt corpus;
  for (const auto& w : words) corpus.passage += w + " ";
  const std::vector<Prompt> prompts = {corpus};
  const auto vocab = SubwordVocab::build_from_corpus(prompts, 200);
  for (auto _ : state) benchmark::DoNotOptimize(subword_tokenize(words, vocab));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(words.size()));
}
BENCHMARK(BM_SubwordTokenize);

void BM_TokenRealignment(benchmark::State& state) {
  Rng rng(4);
  const auto words = gen::random_words(rng, 450);
  Prompt corpus;
  for (const auto& w : words) corpus.passage += w + " ";
  const std::vector<Prompt> prompts = {corpus};
  const auto vocab = SubwordVocab::build_from_corpus(prompts, 50);
  const auto pieces = subword_tokenize(words, vocab);
  std::vector<std::string> fine;
  for (int id : pieces.ids) fine.push_back(vocab.token(id));
  for (auto _ : state) benchmark::DoNotOptimize(token_realignment(words, fine));
}
BENCHMARK(BM_TokenRealignment);

void BM_ClassifyForward(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_train = 8;
  spec.n_dev = 2;
  const auto set = generate_synthetic(spec);
  const auto vocab = SubwordVocab::build_from_corpus(set.planted_train);
  const auto triples = set.kb.triples();
  const auto index = build_vocab_index(triples, set.planted_train);
  const auto prepared = prepare_prompt(set.planted_train[0], vocab, &index, 128);
  ModelConfig c;
  c.encoder.width = static_cast<int>(state.range(0));
  c.encoder.ff_width = 2 * c.encoder.width;
  c.encoder.max_len = 128;
  c.encoder.vocab_size = static_cast<int>(vocab.size());
  Model model(c, index.relations(), 5);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(prepared, 0));
}
BENCHMARK(BM_ClassifyForward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kgfuse
BENCHMARK_MAIN();
