// Shared helpers for the unit suites: scratch paths, random ball points,
// and quick record/graph builders.
#pragma once

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "poincavec/embed.hpp"
#include "poincavec/records.hpp"
#include "poincavec/rng.hpp"
#include "poincavec/txgraph.hpp"

namespace testutil {

// scratch files land in the ctest working directory; the suite prefix keeps
// parallel ctest jobs from clobbering each other
inline std::string tmp_file(const std::string& suite, const std::string& name) {
  return "tmp_" + suite + "_" + name;
}

inline std::vector<double> random_ball_point(poincavec::Rng& rng,
                                             std::size_t dim,
                                             double max_norm) {
  std::vector<double> v(dim);
  double n2 = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    n2 += x * x;
  }
  double n = std::sqrt(n2);
  double target = max_norm * std::pow(rng.next_double(), 1.0 / dim);
  if (n > 0) {
    for (auto& x : v) x *= target / n;
  }
  return v;
}

inline poincavec::TransactionRecord rec(std::string from, std::string to,
                                        double value, std::int64_t ts,
                                        std::string function_name = "") {
  poincavec::TransactionRecord r;
  r.chain = "testnet";
  r.token = "TOK";
  r.tx_id = from + ">" + to + "@" + std::to_string(ts);
  r.timestamp = ts;
  r.from = std::move(from);
  r.to = std::move(to);
  r.value = value;
  r.function_name = std::move(function_name);
  return r;
}

// embedding with explicitly placed rows, aligned to graph node order
inline poincavec::embed::EmbeddingMatrix place_points(
    const poincavec::txgraph::TxGraph& graph,
    const std::vector<std::vector<double>>& points) {
  poincavec::embed::EmbeddingMatrix emb;
  emb.dim = points.at(0).size();
  emb.node_names = graph.addresses;
  emb.values.resize(graph.node_count() * emb.dim, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t d = 0; d < emb.dim; ++d) emb.values[i * emb.dim + d] = points[i][d];
  }
  return emb;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace testutil
