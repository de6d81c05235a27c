// Hyperbolic node embeddings: contrastive hinge on graph edges plus a
// degree-anchored radial pull, optimized with Riemannian SGD on the ball.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "poincavec/geometry.hpp"
#include "poincavec/txgraph.hpp"

namespace poincavec::embed {

using txgraph::Edge;
using txgraph::NodeId;
using txgraph::TxGraph;

struct EmbeddingMatrix {
  std::size_t dim = 0;
  std::vector<std::string> node_names;
  std::vector<double> values;  // row-major, node_count x dim

  std::size_t node_count() const { return node_names.size(); }
  std::span<double> row(std::size_t i) {
    return {values.data() + i * dim, dim};
  }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  bool all_finite() const;
};

struct TrainConfig {
  std::size_t dim = 64;
  std::size_t epochs = 500;
  double margin = 1.0;            // hinge margin
  double radial_weight = 0.1;     // weight of the radial term
  double learning_rate = 0.05;    // decays linearly to final_lr_fraction * lr
  double final_lr_fraction = 0.1;
  std::size_t negatives_per_positive = 1;
  double init_scale = 1e-3;       // init points fill the ball of this radius
  std::uint64_t seed = 0;
  geometry::GeometryConfig geometry{};
};

EmbeddingMatrix init_embeddings(const TxGraph& graph, const TrainConfig& cfg);

// Full-batch losses with optional Euclidean gradients (pass nullptr to skip).
// negatives holds negatives_per_positive entries per positive, flattened.
double contrastive_loss(const EmbeddingMatrix& emb,
                        std::span<const Edge> positives,
                        std::span<const NodeId> negatives, double margin,
                        std::vector<double>* grad);
double radial_loss(const EmbeddingMatrix& emb, const TxGraph& graph,
                   std::vector<double>* grad);
double total_loss(const EmbeddingMatrix& emb, const TxGraph& graph,
                  std::span<const Edge> positives,
                  std::span<const NodeId> negatives, const TrainConfig& cfg,
                  std::vector<double>* grad);

// Euclidean gradient -> tangent step -> mobius translate -> project.
// The step itself is projected into the ball first: mobius_add requires
// both operands inside it.
void riemannian_step(std::span<double> z, std::span<const double> euclid_grad,
                     double lr, const geometry::GeometryConfig& cfg);

struct TraceRow {
  std::size_t epoch = 0;
  double contrastive = 0.0;
  double radial = 0.0;
  double total = 0.0;
};

struct TrainResult {
  EmbeddingMatrix embedding;
  std::vector<TraceRow> trace;  // one row per epoch
};

// graph must have at least one non-self-loop edge -> DegenerateGraph
TrainResult train(const TxGraph& graph, const TrainConfig& cfg);

void write_embedding_csv(const std::string& path, const EmbeddingMatrix& emb);
EmbeddingMatrix read_embedding_csv(const std::string& path);
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace);

}  // namespace poincavec::embed
