#include "poincavec/walkfeat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poincavec/errors.hpp"
#include "poincavec/rng.hpp"

namespace poincavec::walkfeat {

std::vector<std::vector<NodeId>> generate_walks(const TxGraph& graph,
                                                const WalkConfig& cfg) {
  const std::size_t n = graph.node_count();
  std::uint64_t walk_root = derive_seed(cfg.seed, "walk-gen");
  std::vector<std::vector<NodeId>> walks;
  walks.reserve(n * cfg.walks_per_node);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w = 0; w < cfg.walks_per_node; ++w) {
      Rng rng(derive_seed(walk_root, v * cfg.walks_per_node + w));
      std::vector<NodeId> walk;
      walk.reserve(cfg.walk_length);
      NodeId cur = static_cast<NodeId>(v);
      walk.push_back(cur);
      for (std::size_t step = 1; step < cfg.walk_length; ++step) {
        const auto& adj = graph.neighbors[cur];
        if (adj.empty()) break;
        cur = adj[rng.next_below(adj.size())];
        walk.push_back(cur);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// cumulative unigram^(3/4) table sampled by binary search
struct NoiseTable {
  std::vector<double> cdf;

  explicit NoiseTable(const std::vector<double>& weights) {
    cdf.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      cdf[i] = acc;
    }
  }

  std::size_t sample(Rng& rng) const {
    double u = rng.next_double() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
  }
};

}  // namespace

embed::EmbeddingMatrix train_walk_embeddings(
    const std::vector<std::vector<NodeId>>& walks, const TxGraph& graph,
    const WalkConfig& cfg) {
  const std::size_t n = graph.node_count();
  const std::size_t dim = cfg.dim;
  if (walks.empty()) {
    fail(ErrorCode::EmptyInput, "no walks to train on");
  }

  std::vector<double> freq(n, 0.0);
  std::size_t total_pairs = 0;
  for (const auto& walk : walks) {
    for (NodeId v : walk) freq[v] += 1.0;
    for (std::size_t i = 0; i < walk.size(); ++i) {
      std::size_t lo = i >= cfg.context_size ? i - cfg.context_size : 0;
      std::size_t hi = std::min(walk.size() - 1, i + cfg.context_size);
      total_pairs += hi - lo;  // window minus the center itself
    }
  }
  std::vector<double> noise_weights(n);
  for (std::size_t v = 0; v < n; ++v) {
    noise_weights[v] = std::pow(freq[v], 0.75);
  }
  NoiseTable noise(noise_weights);

  Rng rng(derive_seed(cfg.seed, "walk-sgns"));
  embed::EmbeddingMatrix emb;
  emb.dim = dim;
  emb.node_names = graph.addresses;
  emb.values.resize(n * dim);
  for (double& x : emb.values) {
    x = (rng.next_double() - 0.5) / static_cast<double>(dim);
  }
  std::vector<double> ctx(n * dim, 0.0);

  std::vector<std::size_t> order(walks.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad_center(dim);

  const std::size_t total_updates = std::max<std::size_t>(1, total_pairs * cfg.epochs);
  std::size_t done = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t wi : order) {
      const auto& walk = walks[wi];
      for (std::size_t i = 0; i < walk.size(); ++i) {
        std::size_t lo = i >= cfg.context_size ? i - cfg.context_size : 0;
        std::size_t hi = std::min(walk.size() - 1, i + cfg.context_size);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          double progress = static_cast<double>(done) /
                            static_cast<double>(total_updates);
          double lr = cfg.learning_rate +
                      progress * (cfg.final_learning_rate - cfg.learning_rate);
          ++done;
          NodeId center = walk[i];
          double* wc = emb.values.data() + center * dim;
          std::fill(grad_center.begin(), grad_center.end(), 0.0);
          for (std::size_t k = 0; k <= cfg.negatives; ++k) {
            std::size_t target;
            double label;
            if (k == 0) {
              target = walk[j];
              label = 1.0;
            } else {
              target = noise.sample(rng);
              label = 0.0;
            }
            double* ct = ctx.data() + target * dim;
            double score = 0.0;
            for (std::size_t t = 0; t < dim; ++t) score += wc[t] * ct[t];
            double g = (sigmoid(score) - label) * lr;
            for (std::size_t t = 0; t < dim; ++t) {
              grad_center[t] += g * ct[t];
              ct[t] -= g * wc[t];
            }
          }
          for (std::size_t t = 0; t < dim; ++t) wc[t] -= grad_center[t];
        }
      }
    }
  }
  if (!emb.all_finite()) {
    fail(ErrorCode::NonFinite, "walk embedding diverged");
  }
  return emb;
}

}  // namespace poincavec::walkfeat
