// Depth-profile features: how a node's hyperbolic radius sits relative to
// its k-hop neighborhood.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "poincavec/embed.hpp"
#include "poincavec/txgraph.hpp"

namespace poincavec::hierfeat {

using txgraph::NodeId;
using txgraph::TxGraph;

inline constexpr std::size_t kFeatureCount = 11;

struct HierFeatureVector {
  double r_self = 0.0;
  double mean_r = 0.0;     // neighborhood radii
  double stddev_r = 0.0;   // population
  double frac_deeper = 0.0;     // neighbors strictly farther out
  double frac_shallower = 0.0;  // neighbors strictly closer in
  double min_rel = 0.0;    // min over neighbors of (r_u - r_self)
  double max_rel = 0.0;
  // relative radii clamped to [-1, 1], bin edges -1, -.5, 0, .5, 1,
  // counts normalized to fractions
  std::array<double, 4> hist{};

  std::array<double, kFeatureCount> as_array() const;
};

// k-hop BFS neighborhood excluding the node itself; an empty neighborhood
// leaves everything zero except r_self
std::vector<HierFeatureVector> hier_features(const embed::EmbeddingMatrix& emb,
                                             const TxGraph& graph,
                                             std::size_t k_hop);

void write_hier_csv(const std::string& path, const TxGraph& graph,
                    const std::vector<HierFeatureVector>& feats);
std::vector<HierFeatureVector> read_hier_csv(
    const std::string& path, std::vector<std::string>* node_names);

}  // namespace poincavec::hierfeat
