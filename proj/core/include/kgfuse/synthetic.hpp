#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kgfuse/corpus.hpp"
#include "kgfuse/kb.hpp"

namespace kgfuse {

struct SyntheticSpec {
  std::size_t n_train = 64;
  std::size_t n_dev = 32;
  // Extra triples over unused pseudo-word pairs; any that would fire on a
  // prompt are dropped.
  std::size_t noise_triples = 64;
  std::uint64_t seed = 0;
};

// Raw TSV rows in each source format.
struct SyntheticKb {
  std::vector<std::array<std::string, 3>> conceptnet;  // edge, start, end
  std::map<std::string, std::vector<std::array<std::string, 3>>> webchild;  // subject, object, sub-relation
  std::vector<std::array<std::string, 3>> atomic;  // head, relation, tail

  // Same triples the parsers would produce from the written files.
  std::vector<KnowledgeTriple> triples() const;
};

struct PlantedFact {
  std::string prompt_id;
  KnowledgeBase kb = KnowledgeBase::kConceptNet;
  std::string start;
  std::string end;
  std::string edge;
};

struct SyntheticSet {
  // Answer key word appears in the passage.
  std::vector<Prompt> plain_train;
  std::vector<Prompt> plain_dev;
  // Correct answer decidable only through a KB triple.
  std::vector<Prompt> planted_train;
  std::vector<Prompt> planted_dev;
  SyntheticKb kb;
  std::vector<PlantedFact> facts;
};

// Deterministic in `spec`. Labels alternate so each split is balanced
// (exactly half gold 0 for even sizes). Throws DataError if the generator's
// own check fails: a planted triple not firing on its correct view, or any
// triple firing on a distractor view.
SyntheticSet generate_synthetic(const SyntheticSpec& spec);

// plain_{train,dev}.json, planted_{train,dev}.json, conceptnet.tsv,
// webchild/{category}.tsv, atomic.tsv.
void write_synthetic(const SyntheticSet& set, const std::filesystem::path& dir);

}  // namespace kgfuse
