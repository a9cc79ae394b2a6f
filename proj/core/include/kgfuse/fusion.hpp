#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>

#include "kgfuse/kb.hpp"
#include "kgfuse/random.hpp"

namespace kgfuse {

inline constexpr int kKnowledgeEmbeddingWidth = 10;
inline constexpr int kGraphWidth = kKnowledgeEmbeddingWidth * static_cast<int>(kNumKnowledgeBases);
inline constexpr double kKnowledgeInitScale = 0.1;

// One (relations x 10) table per knowledge base.
struct KnowledgeTables {
  std::array<Eigen::MatrixXd, kNumKnowledgeBases> tables;

  Eigen::MatrixXd& operator[](KnowledgeBase kb) { return tables[static_cast<std::size_t>(kb)]; }
  const Eigen::MatrixXd& operator[](KnowledgeBase kb) const { return tables[static_cast<std::size_t>(kb)]; }
};

// Rows drawn i.i.d. from N(0, scale^2).
KnowledgeTables init_tables(const RelationIndex& relations, Rng& rng, double scale = kKnowledgeInitScale);

// Relation row picked per KB (-1 when that KB has no match at the token).
using GraphChoice = std::array<int, kNumKnowledgeBases>;

// Uniform seeded pick among each KB's matches. Throws DataError when a
// relation id is outside its table.
GraphChoice choose_relations(std::span<const Match> matches, const std::array<std::size_t, kNumKnowledgeBases>& rows,
                             Rng& rng);

// 30-vector: ConceptNet row, WebChild row, ATOMIC row (zeros when absent).
Eigen::VectorXd graph_vector(const GraphChoice& choice, const KnowledgeTables& tables);
Eigen::VectorXd resolve_graph_vector(std::span<const Match> matches, const KnowledgeTables& tables, Rng& rng);

// Elementwise sum of the last min(4, L) layer outputs.
Eigen::VectorXd context_vector(std::span<const Eigen::VectorXd> layer_outputs);

// Row-major flattened outer product context x graph, followed by context.
// Output width is 31 * context.size().
Eigen::VectorXd dyadic_fuse(const Eigen::VectorXd& context, const Eigen::VectorXd& graph);

}  // namespace kgfuse
