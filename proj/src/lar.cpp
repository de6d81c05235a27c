#include "poincavec/lar.hpp"

#include <algorithm>
#include <cmath>

#include "poincavec/csv.hpp"
#include "poincavec/errors.hpp"

namespace poincavec::lar {

WindowSpec resolve_window(const TxGraph& graph, const RefineConfig& cfg) {
  WindowSpec w;
  w.start = cfg.window_start.value_or(graph.min_timestamp);
  std::int64_t delta =
      cfg.window_delta.value_or(graph.max_timestamp - graph.min_timestamp);
  w.end = w.start + delta;
  return w;
}

namespace {

inline bool in_window(std::int64_t ts, const WindowSpec& w) {
  return ts >= w.start && ts <= w.end;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

MeanStd window_stats(const std::vector<txgraph::Transfer>& transfers,
                     const WindowSpec& w) {
  MeanStd s;
  double sum = 0.0;
  for (const auto& t : transfers) {
    if (!in_window(t.timestamp, w)) continue;
    sum += t.value;
    ++s.count;
  }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (const auto& t : transfers) {
    if (!in_window(t.timestamp, w)) continue;
    double d = t.value - s.mean;
    sq += d * d;
  }
  s.stddev = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// population z-scores; zero variance maps everything to 0
void zscore(std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  double sd = std::sqrt(var);
  if (sd == 0.0) {
    std::fill(xs.begin(), xs.end(), 0.0);
    return;
  }
  for (double& x : xs) x = (x - mean) / sd;
}

}  // namespace

EdgeFlowStats edge_flow_stats(const TxGraph& graph, NodeId u, NodeId v,
                              const WindowSpec& window) {
  auto it = graph.multi_edges.find({u, v});
  MeanStd s;
  if (it != graph.multi_edges.end()) s = window_stats(it->second, window);
  if (s.count == 0) {
    fail(ErrorCode::EmptyWindow, "no transfers on edge in window");
  }
  return EdgeFlowStats{s.mean, s.stddev, s.count, window};
}

FlowTotals flow_totals(const TxGraph& graph, const WindowSpec& window) {
  FlowTotals totals;
  totals.in_value.assign(graph.node_count(), 0.0);
  totals.out_value.assign(graph.node_count(), 0.0);
  for (const auto& [edge, transfers] : graph.multi_edges) {
    for (const auto& t : transfers) {
      if (!in_window(t.timestamp, window)) continue;
      totals.out_value[edge.first] += t.value;
      totals.in_value[edge.second] += t.value;
    }
  }
  return totals;
}

namespace {

double lar_from_parts(const MeanStd& s, double in_v, double out_v, double eps) {
  return (s.stddev / (s.mean + eps)) * (1.0 + in_v / (out_v + eps));
}

}  // namespace

double edge_lar(const TxGraph& graph, NodeId u, NodeId v,
                const WindowSpec& window, double eps) {
  EdgeFlowStats s = edge_flow_stats(graph, u, v, window);
  FlowTotals totals = flow_totals(graph, window);
  return lar_from_parts(MeanStd{s.mean, s.stddev, s.count},
                        totals.in_value[v], totals.out_value[v], eps);
}

std::map<Edge, double> compute_edge_lars(const TxGraph& graph,
                                         const WindowSpec& window,
                                         double eps) {
  FlowTotals totals = flow_totals(graph, window);
  std::map<Edge, double> out;
  for (const auto& [edge, transfers] : graph.multi_edges) {
    MeanStd s = window_stats(transfers, window);
    if (s.count == 0) continue;
    out[edge] = lar_from_parts(s, totals.in_value[edge.second],
                               totals.out_value[edge.second], eps);
  }
  if (out.empty()) {
    fail(ErrorCode::EmptyWindow, "window contains no transfers");
  }
  return out;
}

std::vector<NodeTrust> node_trust(const TxGraph& graph,
                                  const RefineConfig& cfg) {
  WindowSpec window = resolve_window(graph, cfg);
  double eps = cfg.smoothing_eps;
  FlowTotals totals = flow_totals(graph, window);
  std::map<Edge, double> lars = compute_edge_lars(graph, window, eps);

  const std::size_t n = graph.node_count();
  std::vector<double> lar_sum(n, 0.0);
  std::vector<std::size_t> lar_count(n, 0);
  for (const auto& [edge, lar] : lars) {
    lar_sum[edge.first] += lar;
    lar_count[edge.first] += 1;
    if (edge.second != edge.first) {
      lar_sum[edge.second] += lar;
      lar_count[edge.second] += 1;
    }
  }

  std::vector<NodeTrust> out(n);
  std::vector<double> log_val(n), log_lar(n);
  for (std::size_t v = 0; v < n; ++v) {
    out[v].total_in = totals.in_value[v];
    out[v].total_out = totals.out_value[v];
    out[v].mean_lar =
        lar_count[v] ? lar_sum[v] / static_cast<double>(lar_count[v]) : 0.0;
    log_val[v] = std::log(out[v].total_in + out[v].total_out + eps);
    log_lar[v] = std::log(out[v].mean_lar + eps);
  }
  zscore(log_val);
  zscore(log_lar);
  for (std::size_t v = 0; v < n; ++v) {
    out[v].z_value = log_val[v];
    out[v].z_lar = log_lar[v];
    out[v].tau = logistic(out[v].z_value - out[v].z_lar);
  }
  return out;
}

RefineResult refine(const embed::EmbeddingMatrix& emb, const TxGraph& graph,
                    std::span<const NodeTrust> trust, const RefineConfig& cfg) {
  if (trust.size() != graph.node_count() ||
      emb.node_count() != graph.node_count()) {
    fail(ErrorCode::MisalignedInputs,
         "embedding, trust and graph disagree on node count");
  }
  RefineResult result;
  result.embedding = emb;
  embed::EmbeddingMatrix& cur = result.embedding;
  const std::size_t n = graph.node_count();
  const std::size_t dim = emb.dim;

  embed::EmbeddingMatrix next = cur;
  std::vector<double> tangent(dim), lg(dim);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& adj = graph.neighbors[i];
      if (adj.empty()) {
        auto src = cur.row(i);
        std::copy(src.begin(), src.end(), next.row(i).begin());
        continue;
      }
      double tau_sum = 0.0;
      for (NodeId j : adj) tau_sum += trust[j].tau;
      std::fill(tangent.begin(), tangent.end(), 0.0);
      for (NodeId j : adj) {
        geometry::log0(cur.row(j), lg);
        double alpha = trust[j].tau / tau_sum;
        for (std::size_t t = 0; t < dim; ++t) tangent[t] += alpha * lg[t];
      }
      geometry::exp0(tangent, next.row(i), cfg.geometry);
    }
    double max_move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      max_move = std::max(max_move,
                          geometry::distance(cur.row(i), next.row(i)));
    }
    cur.values = next.values;
    result.steps_run = step + 1;
    if (max_move < cfg.convergence_tol) break;
  }
  return result;
}

void write_trust_csv(const std::string& path, const TxGraph& graph,
                     std::span<const NodeTrust> trust) {
  CsvWriter w(path);
  w.row({"node", "total_in", "total_out", "mean_lar", "z_val", "z_lar",
         "tau"});
  for (std::size_t v = 0; v < trust.size(); ++v) {
    w.row({graph.addresses[v], format_double(trust[v].total_in),
           format_double(trust[v].total_out), format_double(trust[v].mean_lar),
           format_double(trust[v].z_value), format_double(trust[v].z_lar),
           format_double(trust[v].tau)});
  }
}

}  // namespace poincavec::lar
