#include "poincavec/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poincavec/csv.hpp"
#include "poincavec/errors.hpp"
#include "poincavec/rng.hpp"

namespace poincavec::embed {

bool EmbeddingMatrix::all_finite() const {
  for (double x : values) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

EmbeddingMatrix init_embeddings(const TxGraph& graph, const TrainConfig& cfg) {
  EmbeddingMatrix emb;
  emb.dim = cfg.dim;
  emb.node_names = graph.addresses;
  emb.values.resize(graph.node_count() * cfg.dim);
  Rng rng(derive_seed(cfg.seed, "embed-init"));
  for (std::size_t i = 0; i < emb.node_count(); ++i) {
    auto row = emb.row(i);
    double n2 = 0.0;
    for (double& x : row) {
      x = rng.normal();
      n2 += x * x;
    }
    double n = std::sqrt(n2);
    if (n > 0.0) {
      // radius CDF inversion keeps the density uniform over ball volume
      double r = cfg.init_scale * std::pow(rng.next_double(),
                                           1.0 / static_cast<double>(cfg.dim));
      for (double& x : row) x *= r / n;
    }
    geometry::project(row, cfg.geometry);
  }
  return emb;
}

namespace {

// target radius shrinks with degree: hubs sit near the origin
double radial_target(const TxGraph& graph, NodeId v, double max_deg) {
  return 1.0 - static_cast<double>(graph.degree(v)) / max_deg;
}

}  // namespace

double contrastive_loss(const EmbeddingMatrix& emb,
                        std::span<const Edge> positives,
                        std::span<const NodeId> negatives, double margin,
                        std::vector<double>* grad) {
  if (grad) {
    grad->assign(emb.values.size(), 0.0);
  }
  if (positives.empty()) return 0.0;
  const std::size_t per_pos = negatives.size() / positives.size();
  const std::size_t dim = emb.dim;
  std::vector<double> gi(dim), gj(dim), gni(dim), gn(dim);
  double loss = 0.0;
  for (std::size_t p = 0; p < positives.size(); ++p) {
    auto [i, j] = positives[p];
    double pos_d = grad ? geometry::distance_with_grad(emb.row(i), emb.row(j),
                                                       gi, gj)
                        : geometry::distance(emb.row(i), emb.row(j));
    double sample = 0.0;
    for (std::size_t k = 0; k < per_pos; ++k) {
      NodeId n = negatives[p * per_pos + k];
      double neg_d = grad ? geometry::distance_with_grad(emb.row(i), emb.row(n),
                                                         gni, gn)
                          : geometry::distance(emb.row(i), emb.row(n));
      double hinge = pos_d - neg_d + margin;
      if (hinge <= 0.0) continue;
      sample += hinge;
      if (grad) {
        double s = 1.0 / (static_cast<double>(positives.size()) *
                          static_cast<double>(per_pos));
        double* g = grad->data();
        for (std::size_t t = 0; t < dim; ++t) {
          g[i * dim + t] += s * (gi[t] - gni[t]);
          g[j * dim + t] += s * gj[t];
          g[n * dim + t] -= s * gn[t];
        }
      }
    }
    loss += sample / static_cast<double>(per_pos);
  }
  return loss / static_cast<double>(positives.size());
}

double radial_loss(const EmbeddingMatrix& emb, const TxGraph& graph,
                   std::vector<double>* grad) {
  if (grad) {
    grad->assign(emb.values.size(), 0.0);
  }
  const double max_deg = static_cast<double>(graph.max_degree());
  if (max_deg == 0.0) {
    fail(ErrorCode::DegenerateGraph, "all nodes isolated; no degree anchor");
  }
  const std::size_t n = emb.node_count();
  const std::size_t dim = emb.dim;
  double loss = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    auto z = emb.row(v);
    double zn = geometry::norm(z);
    double diff = zn - radial_target(graph, static_cast<NodeId>(v), max_deg);
    loss += diff * diff;
    if (grad && zn > 0.0) {
      double s = 2.0 * diff / (static_cast<double>(n) * zn);
      for (std::size_t t = 0; t < dim; ++t) {
        (*grad)[v * dim + t] += s * z[t];
      }
    }
  }
  return loss / static_cast<double>(n);
}

double total_loss(const EmbeddingMatrix& emb, const TxGraph& graph,
                  std::span<const Edge> positives,
                  std::span<const NodeId> negatives, const TrainConfig& cfg,
                  std::vector<double>* grad) {
  std::vector<double> radial_grad;
  double lc = contrastive_loss(emb, positives, negatives, cfg.margin, grad);
  double lr = radial_loss(emb, graph, grad ? &radial_grad : nullptr);
  if (grad) {
    for (std::size_t t = 0; t < grad->size(); ++t) {
      (*grad)[t] += cfg.radial_weight * radial_grad[t];
    }
  }
  return lc + cfg.radial_weight * lr;
}

void riemannian_step(std::span<double> z, std::span<const double> euclid_grad,
                     double lr, const geometry::GeometryConfig& cfg) {
  const std::size_t dim = z.size();
  double zz = geometry::squared_norm(z);
  double rescale = (1.0 - zz) * (1.0 - zz) / 4.0;
  std::vector<double> step(dim);
  for (std::size_t t = 0; t < dim; ++t) {
    step[t] = -lr * rescale * euclid_grad[t];
  }
  geometry::project(step, cfg);
  std::vector<double> moved(dim);
  geometry::mobius_add(z, step, moved, cfg);
  std::copy(moved.begin(), moved.end(), z.begin());
}

namespace {

struct TouchedGrads {
  // tiny linear map: a sample touches at most 2 + negatives points
  std::vector<NodeId> nodes;
  std::vector<std::vector<double>> grads;
  std::size_t dim;

  explicit TouchedGrads(std::size_t d) : dim(d) {}

  std::vector<double>& at(NodeId v) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i] == v) return grads[i];
    }
    nodes.push_back(v);
    grads.emplace_back(dim, 0.0);
    return grads.back();
  }

  void clear() {
    nodes.clear();
    grads.clear();
  }
};

}  // namespace

TrainResult train(const TxGraph& graph, const TrainConfig& cfg) {
  std::vector<Edge> positives = graph.trainable_edges();
  if (positives.empty()) {
    fail(ErrorCode::DegenerateGraph,
         "graph has no edges between distinct nodes");
  }
  const std::size_t n_nodes = graph.node_count();
  const std::size_t dim = cfg.dim;
  const std::size_t per_pos = std::max<std::size_t>(1, cfg.negatives_per_positive);
  const double max_deg = static_cast<double>(graph.max_degree());

  TrainResult result;
  result.embedding = init_embeddings(graph, cfg);
  EmbeddingMatrix& emb = result.embedding;

  // Fixed negatives make the per-epoch trace comparable across epochs. The
  // positive's partner is excluded: a j+ negative pins its term at the
  // margin and would hide contraction. Training negatives below stay
  // uniform over all nodes, collisions included.
  std::vector<NodeId> trace_negatives(positives.size() * per_pos);
  {
    Rng trace_rng(derive_seed(cfg.seed, "embed-trace"));
    for (std::size_t p = 0; p < positives.size(); ++p) {
      for (std::size_t k = 0; k < per_pos; ++k) {
        NodeId n;
        do {
          n = static_cast<NodeId>(trace_rng.next_below(n_nodes));
        } while (n == positives[p].second);
        trace_negatives[p * per_pos + k] = n;
      }
    }
  }

  Rng rng(derive_seed(cfg.seed, "embed-sgd"));
  std::vector<std::size_t> order(positives.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> g_pos_i(dim), g_pos_j(dim), g_neg_i(dim), g_neg_n(dim);
  TouchedGrads touched(dim);
  std::vector<NodeId> sample_nodes;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double progress = cfg.epochs > 1
                          ? static_cast<double>(epoch) /
                                static_cast<double>(cfg.epochs - 1)
                          : 0.0;
    double lr = cfg.learning_rate *
                (1.0 - progress * (1.0 - cfg.final_lr_fraction));
    rng.shuffle(order);
    for (std::size_t idx : order) {
      auto [i, j] = positives[idx];
      touched.clear();
      sample_nodes.assign({i, j});
      double pos_d =
          geometry::distance_with_grad(emb.row(i), emb.row(j), g_pos_i, g_pos_j);
      bool any_active = false;
      for (std::size_t k = 0; k < per_pos; ++k) {
        NodeId n = static_cast<NodeId>(rng.next_below(n_nodes));
        sample_nodes.push_back(n);
        double neg_d = geometry::distance_with_grad(emb.row(i), emb.row(n),
                                                    g_neg_i, g_neg_n);
        if (pos_d - neg_d + cfg.margin <= 0.0) continue;
        any_active = true;
        double s = 1.0 / static_cast<double>(per_pos);
        // at() may grow the store, so never hold two references across calls
        {
          auto& gi = touched.at(i);
          for (std::size_t t = 0; t < dim; ++t) {
            gi[t] += s * (g_pos_i[t] - g_neg_i[t]);
          }
        }
        {
          auto& gn = touched.at(n);
          for (std::size_t t = 0; t < dim; ++t) gn[t] -= s * g_neg_n[t];
        }
        {
          auto& gj = touched.at(j);
          for (std::size_t t = 0; t < dim; ++t) gj[t] += s * g_pos_j[t];
        }
      }
      if (cfg.radial_weight > 0.0) {
        // every point the sample evaluated feels its radial pull, the drawn
        // negatives included; duplicates pull once
        for (std::size_t a = 0; a < sample_nodes.size(); ++a) {
          NodeId v = sample_nodes[a];
          bool repeat = false;
          for (std::size_t b = 0; b < a; ++b) {
            if (sample_nodes[b] == v) {
              repeat = true;
              break;
            }
          }
          if (repeat) continue;
          auto z = emb.row(v);
          double zn = geometry::norm(z);
          if (zn == 0.0) continue;
          double diff = zn - radial_target(graph, v, max_deg);
          double s = cfg.radial_weight * 2.0 * diff / zn;
          auto& gv = touched.at(v);
          for (std::size_t t = 0; t < dim; ++t) gv[t] += s * z[t];
          any_active = true;
        }
      }
      if (!any_active) continue;
      for (std::size_t t = 0; t < touched.nodes.size(); ++t) {
        riemannian_step(emb.row(touched.nodes[t]), touched.grads[t], lr,
                        cfg.geometry);
      }
    }
    TraceRow row;
    row.epoch = epoch + 1;
    row.contrastive =
        contrastive_loss(emb, positives, trace_negatives, cfg.margin, nullptr);
    row.radial = radial_loss(emb, graph, nullptr);
    row.total = row.contrastive + cfg.radial_weight * row.radial;
    result.trace.push_back(row);
  }

  if (!emb.all_finite()) {
    fail(ErrorCode::NonFinite, "embedding diverged to non-finite values");
  }
  return result;
}

void write_embedding_csv(const std::string& path, const EmbeddingMatrix& emb) {
  CsvWriter w(path);
  std::vector<std::string> header;
  header.reserve(emb.dim + 1);
  header.push_back("node");
  for (std::size_t t = 0; t < emb.dim; ++t) {
    header.push_back("dim_" + std::to_string(t));
  }
  w.row(header);
  std::vector<std::string> fields;
  for (std::size_t i = 0; i < emb.node_count(); ++i) {
    fields.clear();
    fields.push_back(emb.node_names[i]);
    for (double x : emb.row(i)) fields.push_back(format_double(x));
    w.row(fields);
  }
}

EmbeddingMatrix read_embedding_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.empty() || table.header[0] != "node") {
    fail(ErrorCode::MissingColumn, path + ": first column must be 'node'");
  }
  EmbeddingMatrix emb;
  emb.dim = table.header.size() - 1;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      fail(ErrorCode::MisalignedInputs, path + ": ragged embedding row");
    }
    emb.node_names.push_back(row[0]);
    for (std::size_t t = 1; t < row.size(); ++t) {
      auto x = parse_double(row[t]);
      if (!x) {
        fail(ErrorCode::MisalignedInputs,
             path + ": bad number '" + row[t] + "'");
      }
      emb.values.push_back(*x);
    }
  }
  if (emb.node_names.empty()) {
    fail(ErrorCode::EmptyFile, path + ": no embedding rows");
  }
  return emb;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace) {
  CsvWriter w(path);
  w.row({"epoch", "loss_contrastive", "loss_radial", "loss_total"});
  for (const auto& row : trace) {
    w.row({std::to_string(row.epoch), format_double(row.contrastive),
           format_double(row.radial), format_double(row.total)});
  }
}

}  // namespace poincavec::embed
