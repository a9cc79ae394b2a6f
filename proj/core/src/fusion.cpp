#include "kgfuse/fusion.hpp"

#include "kgfuse/error.hpp"

namespace kgfuse {

KnowledgeTables init_tables(const RelationIndex& relations, Rng& rng, double scale) {
  KnowledgeTables out;
  for (auto kb : kAllKnowledgeBases) {
    auto& t = out[kb];
    t.resize(static_cast<Eigen::Index>(relations.size(kb)), kKnowledgeEmbeddingWidth);
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = scale * rng.normal();
    }
  }
  return out;
}

GraphChoice choose_relations(std::span<const Match> matches, const std::array<std::size_t, kNumKnowledgeBases>& rows,
                             Rng& rng) {
  GraphChoice choice;
  choice.fill(-1);
  std::array<std::vector<int>, kNumKnowledgeBases> per_kb;
  for (const auto& m : matches) {
    const auto k = static_cast<std::size_t>(m.kb);
    if (m.relation < 0 || static_cast<std::size_t>(m.relation) >= rows[k]) {
      throw DataError("relation id " + std::to_string(m.relation) + " invalid for " + std::string(to_string(m.kb)));
    }
    per_kb[k].push_back(m.relation);
  }
  for (std::size_t k = 0; k < kNumKnowledgeBases; ++k) {
    const auto& ids = per_kb[k];
    if (ids.empty()) continue;
    choice[k] = ids.size() == 1 ? ids.front() : ids[rng.uniform_int(ids.size())];
  }
  return choice;
}

Eigen::VectorXd graph_vector(const GraphChoice& choice, const KnowledgeTables& tables) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(kGraphWidth);
  for (std::size_t k = 0; k < kNumKnowledgeBases; ++k) {
    if (choice[k] < 0) continue;
    g.segment(static_cast<Eigen::Index>(k) * kKnowledgeEmbeddingWidth, kKnowledgeEmbeddingWidth) =
        tables.tables[k].row(choice[k]).transpose();
  }
  return g;
}

Eigen::VectorXd resolve_graph_vector(std::span<const Match> matches, const KnowledgeTables& tables, Rng& rng) {
  std::array<std::size_t, kNumKnowledgeBases> rows{};
  for (std::size_t k = 0; k < kNumKnowledgeBases; ++k) rows[k] = static_cast<std::size_t>(tables.tables[k].rows());
  return graph_vector(choose_relations(matches, rows, rng), tables);
}

Eigen::VectorXd context_vector(std::span<const Eigen::VectorXd> layer_outputs) {
  if (layer_outputs.empty()) throw DataError("context_vector: no layers");
  const std::size_t first = layer_outputs.size() > 4 ? layer_outputs.size() - 4 : 0;
  Eigen::VectorXd sum = layer_outputs[first];
  for (std::size_t l = first + 1; l < layer_outputs.size(); ++l) {
    if (layer_outputs[l].size() != sum.size()) throw DataError("context_vector: ragged layer widths");
    sum += layer_outputs[l];
  }
  return sum;
}

Eigen::VectorXd dyadic_fuse(const Eigen::VectorXd& context, const Eigen::VectorXd& graph) {
  if (graph.size() != kGraphWidth) {
    throw DataError("dyadic_fuse: graph vector must have width " + std::to_string(kGraphWidth));
  }
  const Eigen::Index d = context.size();
  Eigen::VectorXd out(d * (kGraphWidth + 1));
  for (Eigen::Index i = 0; i < d; ++i) {
    out.segment(i * kGraphWidth, kGraphWidth) = context(i) * graph;
  }
  out.tail(d) = context;
  return out;
}

}  // namespace kgfuse
