// Flow anomaly scoring (dispersion-weighted liquidity ratios per directed
// edge), node trust scores, and trust-weighted embedding refinement.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "poincavec/embed.hpp"
#include "poincavec/txgraph.hpp"

namespace poincavec::lar {

using txgraph::Edge;
using txgraph::NodeId;
using txgraph::TxGraph;

struct RefineConfig {
  std::size_t steps = 3;
  double smoothing_eps = 1e-6;
  double convergence_tol = 1e-4;  // max hyperbolic displacement per sweep
  // closed interval [start, start + delta]; defaults cover the whole graph
  std::optional<std::int64_t> window_start;
  std::optional<std::int64_t> window_delta;
  geometry::GeometryConfig geometry{};
};

struct WindowSpec {
  std::int64_t start = 0;
  std::int64_t end = 0;  // inclusive
};

WindowSpec resolve_window(const TxGraph& graph, const RefineConfig& cfg);

struct EdgeFlowStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
  WindowSpec window{};
};

// transfers of directed edge (u, v) inside the window; none -> EmptyWindow
EdgeFlowStats edge_flow_stats(const TxGraph& graph, NodeId u, NodeId v,
                              const WindowSpec& window);

// per-node incoming/outgoing value totals inside the window
struct FlowTotals {
  std::vector<double> in_value;
  std::vector<double> out_value;
};

FlowTotals flow_totals(const TxGraph& graph, const WindowSpec& window);

// (stddev / (mean + eps)) * (1 + in(v) / (out(v) + eps))
double edge_lar(const TxGraph& graph, NodeId u, NodeId v,
                const WindowSpec& window, double eps);

// every directed edge with at least one in-window transfer; all edges
// empty -> EmptyWindow
std::map<Edge, double> compute_edge_lars(const TxGraph& graph,
                                         const WindowSpec& window, double eps);

struct NodeTrust {
  double total_in = 0.0;
  double total_out = 0.0;
  double mean_lar = 0.0;  // over incident in-window directed edges
  double z_value = 0.0;   // z-score of log(total flow + eps)
  double z_lar = 0.0;     // z-score of log(mean_lar + eps)
  double tau = 0.5;       // logistic(z_value - z_lar)
};

// High-throughput nodes with unremarkable flow dispersion score high;
// zero-variance statistics collapse every tau to 0.5.
std::vector<NodeTrust> node_trust(const TxGraph& graph,
                                  const RefineConfig& cfg);

struct RefineResult {
  embed::EmbeddingMatrix embedding;
  std::size_t steps_run = 0;
};

// Synchronous sweeps: each node moves to the exp-image of the trust-weighted
// tangent average of its neighbors. Isolated nodes stay put. Stops early
// once the largest displacement falls below convergence_tol.
RefineResult refine(const embed::EmbeddingMatrix& emb, const TxGraph& graph,
                    std::span<const NodeTrust> trust, const RefineConfig& cfg);

void write_trust_csv(const std::string& path, const TxGraph& graph,
                     std::span<const NodeTrust> trust);

}  // namespace poincavec::lar
