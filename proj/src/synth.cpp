#include "poincavec/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "poincavec/errors.hpp"
#include "poincavec/geometry.hpp"
#include "poincavec/rng.hpp"

namespace poincavec::synth {

namespace {

std::string padded(const char* prefix, std::size_t i, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, i);
  return std::string(buf);
}

}  // namespace

IdealTree ideal_tree_embedding(const TreeSpec& spec, std::size_t dim,
                               std::uint64_t seed) {
  if (dim < 2) fail(ErrorCode::BadConfig, "tree embedding needs dim >= 2");
  if (spec.branching < 1) fail(ErrorCode::BadConfig, "branching must be >= 1");

  IdealTree tree;
  std::size_t count = 1;
  std::size_t level_size = 1;
  for (std::size_t l = 1; l <= spec.depth; ++l) {
    level_size *= spec.branching;
    count += level_size;
  }

  tree.depths.resize(count);
  tree.embedding.dim = dim;
  tree.embedding.values.assign(count * dim, 0.0);
  tree.embedding.node_names.reserve(count);
  int width = count > 1 ? static_cast<int>(std::to_string(count - 1).size()) : 1;
  for (std::size_t i = 0; i < count; ++i) {
    tree.embedding.node_names.push_back(padded("tree_", i, width));
  }

  // per-level norms; one nonzero coordinate keeps them bitwise equal
  std::vector<double> level_norm(spec.depth + 1, 0.0);
  for (std::size_t l = 1; l <= spec.depth; ++l) {
    level_norm[l] =
        std::tanh(static_cast<double>(l) * spec.step_length / 2.0);
  }

  Rng rng(derive_seed(seed, "ideal-tree"));
  std::size_t next_node = 1;
  std::vector<NodeId> frontier{0};
  tree.depths[0] = 0;
  for (std::size_t l = 1; l <= spec.depth; ++l) {
    std::vector<NodeId> next_frontier;
    for (NodeId parent : frontier) {
      for (std::size_t b = 0; b < spec.branching; ++b) {
        NodeId child = static_cast<NodeId>(next_node++);
        tree.edges.emplace_back(parent, child);
        tree.depths[child] = l;
        auto row = tree.embedding.row(child);
        std::size_t axis = rng.next_below(dim);
        double sign = rng.next_below(2) == 0 ? 1.0 : -1.0;
        row[axis] = sign * level_norm[l];
        next_frontier.push_back(child);
      }
    }
    frontier = std::move(next_frontier);
  }
  return tree;
}

namespace {

// average ranks, 1-based; ties share the mean of their positions
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

SpearmanResult spearman(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) {
    fail(ErrorCode::MisalignedInputs, "rank correlation needs equal sizes");
  }
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
    cov += (rx[i] - mx) * (ry[i] - my);
  }
  if (vx == 0.0 || vy == 0.0) {
    return SpearmanResult{0.0, true};
  }
  if (rx == ry) {
    // identical rank vectors; avoids reporting 1 - epsilon
    return SpearmanResult{1.0, false};
  }
  double rho = cov / std::sqrt(vx * vy);
  rho = std::clamp(rho, -1.0, 1.0);
  return SpearmanResult{rho, false};
}

SpearmanResult check_radius_monotonicity(
    const embed::EmbeddingMatrix& emb, const std::vector<std::size_t>& depths) {
  if (emb.node_count() != depths.size()) {
    fail(ErrorCode::MisalignedInputs, "embedding and depths sizes differ");
  }
  std::vector<double> radii(emb.node_count());
  std::vector<double> depth_values(depths.size());
  for (std::size_t i = 0; i < emb.node_count(); ++i) {
    radii[i] = geometry::radius(emb.row(i));
    depth_values[i] = static_cast<double>(depths[i]);
  }
  return spearman(radii, depth_values);
}

std::vector<TransactionRecord> tree_records(const IdealTree& tree) {
  std::vector<TransactionRecord> records;
  records.reserve(tree.edges.size());
  std::int64_t ts = 1700000000;
  std::size_t i = 0;
  for (auto [parent, child] : tree.edges) {
    TransactionRecord rec;
    rec.chain = "synthetic";
    rec.token = "TREE";
    rec.tx_id = padded("tx_", i++, 6);
    rec.timestamp = ts++;
    rec.from = tree.embedding.node_names[parent];
    rec.to = tree.embedding.node_names[child];
    rec.value = 1.0;
    rec.function_name = "transfer";
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

void emit_pair(std::vector<TransactionRecord>& records, Rng& rng,
               const std::string& a, const std::string& b,
               const PairPlan& plan, const PlantedRoleSpec& spec,
               std::size_t& tx_counter) {
  for (int dir = 0; dir < 2; ++dir) {
    const std::string& from = dir == 0 ? a : b;
    const std::string& to = dir == 0 ? b : a;
    std::size_t count =
        plan.count_lo + rng.next_below(plan.count_hi - plan.count_lo + 1);
    for (std::size_t i = 0; i < count; ++i) {
      TransactionRecord rec;
      rec.chain = "synthetic";
      rec.token = "PLANT";
      rec.tx_id = padded("tx_", tx_counter++, 7);
      rec.timestamp =
          spec.t_start + static_cast<std::int64_t>(
                             rng.next_below(static_cast<std::uint64_t>(spec.t_span)));
      rec.from = from;
      rec.to = to;
      rec.value = rng.lognormal(plan.value_log_mean, plan.value_log_sigma);
      rec.function_name = "transfer";
      records.push_back(std::move(rec));
    }
  }
}

}  // namespace

PlantedGraph generate_planted_graph(const PlantedRoleSpec& spec) {
  PlantedGraph out;
  std::vector<std::string> hubs, relays, traders;
  for (std::size_t i = 0; i < spec.n_hubs; ++i) {
    hubs.push_back(padded("hub_", i, 2));
    out.labels.push_back(LabeledAddress{
        hubs.back(), Role::Treasury,
        "Gnosis Safe: planted treasury " + std::to_string(i)});
  }
  for (std::size_t i = 0; i < spec.n_relays; ++i) {
    relays.push_back(padded("relay_", i, 2));
    out.labels.push_back(LabeledAddress{
        relays.back(), Role::Bot, "MEV Bot " + std::to_string(i)});
  }
  for (std::size_t i = 0; i < spec.n_traders; ++i) {
    traders.push_back(padded("trader_", i, 3));
    out.labels.push_back(LabeledAddress{
        traders.back(), Role::Trader, "DEX Trader " + std::to_string(i)});
  }

  Rng rng(derive_seed(spec.seed, "planted-roles"));
  std::size_t tx_counter = 0;
  for (const auto& hub : hubs) {
    for (const auto& relay : relays) {
      if (rng.next_double() >= spec.hub_relay_p) continue;
      emit_pair(out.records, rng, hub, relay, spec.hub_relay, spec, tx_counter);
    }
  }
  for (std::size_t i = 0; i < traders.size(); ++i) {
    if (rng.next_double() >= spec.relay_trader_p) continue;
    const auto& relay = relays[i % relays.size()];
    emit_pair(out.records, rng, relay, traders[i], spec.relay_trader, spec,
              tx_counter);
  }
  // retail flows pair consecutive traders of one relay family, keeping
  // trader degree at two so smoothing cannot collapse them onto the relay
  const std::size_t stride = relays.size();
  for (std::size_t f = 0; f < stride && f < traders.size(); ++f) {
    for (std::size_t a = f; a + stride < traders.size(); a += 2 * stride) {
      if (rng.next_double() >= spec.trader_trader_p) continue;
      emit_pair(out.records, rng, traders[a], traders[a + stride],
                spec.trader_trader, spec, tx_counter);
    }
  }
  if (out.records.empty()) {
    fail(ErrorCode::EmptyInput, "planted generator produced no transfers");
  }
  return out;
}

}  // namespace poincavec::synth
