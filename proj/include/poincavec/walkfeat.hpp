// Euclidean context embeddings: uniform random walks over the undirected
// graph feed a skip-gram model with negative sampling.
#pragma once

#include <cstdint>
#include <vector>

#include "poincavec/embed.hpp"
#include "poincavec/txgraph.hpp"

namespace poincavec::walkfeat {

using txgraph::NodeId;
using txgraph::TxGraph;

struct WalkConfig {
  std::size_t walk_length = 5;    // nodes per walk, start included
  std::size_t walks_per_node = 10;
  std::size_t context_size = 10;  // one-sided skip-gram window
  std::size_t dim = 64;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;   // decays linearly to final_learning_rate
  double final_learning_rate = 1e-4;
  std::uint64_t seed = 0;
};

// walks_per_node walks starting at every node, in node order; each step
// picks uniformly among undirected neighbors. Isolated nodes produce
// singleton walks. Each walk draws from its own derived stream, so the
// corpus is independent of generation order.
std::vector<std::vector<NodeId>> generate_walks(const TxGraph& graph,
                                                const WalkConfig& cfg);

// Skip-gram over the walk corpus; negatives come from the walk-frequency
// unigram distribution raised to 3/4. Returns the input-side vectors.
embed::EmbeddingMatrix train_walk_embeddings(
    const std::vector<std::vector<NodeId>>& walks, const TxGraph& graph,
    const WalkConfig& cfg);

}  // namespace poincavec::walkfeat
