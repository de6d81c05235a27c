// Synthetic fixtures: analytic tree layouts whose radii grow linearly with
// depth, rank correlation to check that property, and a planted-role
// transaction generator for end-to-end runs.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "poincavec/embed.hpp"
#include "poincavec/records.hpp"
#include "poincavec/txgraph.hpp"

namespace poincavec::synth {

using txgraph::NodeId;

struct TreeSpec {
  std::size_t branching = 3;
  std::size_t depth = 4;
  double step_length = 1.0;  // hyperbolic distance added per level
};

struct IdealTree {
  std::vector<std::pair<NodeId, NodeId>> edges;  // parent -> child
  std::vector<std::size_t> depths;               // by node id
  embed::EmbeddingMatrix embedding;
};

// Nodes sit on signed coordinate axes at norm tanh(depth * step / 2), so
// every node of a level shares a bitwise-identical radius and the rank of
// radii reproduces the rank of depths exactly. dim must be >= 2.
IdealTree ideal_tree_embedding(const TreeSpec& spec, std::size_t dim,
                               std::uint64_t seed);

struct SpearmanResult {
  double rho = 0.0;
  bool degenerate = false;  // either side had zero rank variance
};

// average-rank Spearman; identical rank vectors short-circuit to exactly 1
SpearmanResult spearman(const std::vector<double>& x,
                        const std::vector<double>& y);

SpearmanResult check_radius_monotonicity(const embed::EmbeddingMatrix& emb,
                                         const std::vector<std::size_t>& depths);

// one unit transfer per tree edge, timestamps increasing in edge order
std::vector<TransactionRecord> tree_records(const IdealTree& tree);

struct PairPlan {
  std::size_t count_lo = 1;
  std::size_t count_hi = 1;  // transfers per direction, inclusive bounds
  double value_log_mean = 0.0;
  double value_log_sigma = 1.0;
};

// Attachment: every hub-relay pair connects with hub_relay_p; each trader
// attaches to one relay round-robin with relay_trader_p, so relay degrees
// stay uniform and the three tiers keep distinct degree profiles; paired
// trader-trader retail flows keep trader degree at two. Defaults land near
// 3000 transfers.
struct PlantedRoleSpec {
  std::size_t n_hubs = 2;
  std::size_t n_relays = 10;
  std::size_t n_traders = 100;
  double hub_relay_p = 1.0;
  double relay_trader_p = 1.0;
  double trader_trader_p = 1.0;
  PairPlan hub_relay{10, 14, std::log(1e6), 0.15};
  PairPlan relay_trader{10, 14, std::log(5e3), 1.2};
  PairPlan trader_trader{1, 2, std::log(50.0), 1.5};
  std::int64_t t_start = 1700000000;
  std::int64_t t_span = 30 * 86400;
  std::uint64_t seed = 0;
};

struct PlantedGraph {
  std::vector<TransactionRecord> records;
  std::vector<LabeledAddress> labels;  // planted ground truth
};

// Hubs behave like custodial treasuries (few, high-degree, large steady
// flows), relays like automated intermediaries, traders like long-tail
// retail. Name tags are chosen so the shipped role rules recover the
// planted labels.
PlantedGraph generate_planted_graph(const PlantedRoleSpec& spec);

}  // namespace poincavec::synth
