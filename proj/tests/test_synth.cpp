#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "poincavec/bucketing.hpp"
#include "poincavec/geometry.hpp"
#include "poincavec/rng.hpp"
#include "poincavec/synth.hpp"
#include "poincavec/txgraph.hpp"
#include "test_util.hpp"

using namespace poincavec;
namespace geo = poincavec::geometry;

TEST_SUITE("synth") {

TEST_CASE("ideal tree has the full node and edge census") {
  synth::TreeSpec spec;  // branching 3, depth 4: 1+3+9+27+81 = 121 nodes
  auto tree = synth::ideal_tree_embedding(spec, 4, 0);
  CHECK(tree.embedding.node_names.size() == 121);
  CHECK(tree.depths.size() == 121);
  CHECK(tree.edges.size() == 120);
  CHECK(tree.embedding.dim == 4);
  CHECK(tree.embedding.all_finite());

  // depth census: 3^h nodes per level, every edge spans one level
  std::map<std::size_t, std::size_t> census;
  for (auto d : tree.depths) ++census[d];
  for (std::size_t h = 0; h <= 4; ++h) {
    CHECK(census[h] == static_cast<std::size_t>(std::pow(3.0, h) + 0.5));
  }
  for (auto [parent, child] : tree.edges) {
    CHECK(tree.depths[child] == tree.depths[parent] + 1);
  }
}

TEST_CASE("ideal tree radii are exact in depth") {
  synth::TreeSpec spec;
  spec.step_length = 0.8;
  auto tree = synth::ideal_tree_embedding(spec, 3, 1);
  for (std::size_t v = 0; v < tree.depths.size(); ++v) {
    double h = static_cast<double>(tree.depths[v]);
    double want_norm = std::tanh(h * 0.8 / 2.0);
    CHECK(geo::norm(tree.embedding.row(v)) ==
          doctest::Approx(want_norm).epsilon(1e-12));
    CHECK(geo::radius(tree.embedding.row(v)) ==
          doctest::Approx(h * 0.8).epsilon(1e-9));
  }
  // root sits at the exact origin
  CHECK(geo::norm(tree.embedding.row(0)) == 0.0);
}

TEST_CASE("ideal layout is perfectly depth-monotone") {
  auto tree = synth::ideal_tree_embedding({}, 2, 0);
  auto result = synth::check_radius_monotonicity(tree.embedding, tree.depths);
  CHECK(!result.degenerate);
  CHECK(result.rho == 1.0);  // identical ranks short-circuit exactly
}

TEST_CASE("shuffled depths destroy the correlation") {
  auto tree = synth::ideal_tree_embedding({}, 2, 0);
  Rng rng(13);
  double mean_abs = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto shuffled = tree.depths;
    rng.shuffle(shuffled);
    auto r = synth::check_radius_monotonicity(tree.embedding, shuffled);
    mean_abs += std::abs(r.rho);
  }
  mean_abs /= 20.0;
  CHECK(mean_abs < 0.2);
}

TEST_CASE("constant radii flag a degenerate correlation") {
  embed::EmbeddingMatrix emb;
  emb.dim = 2;
  emb.node_names = {"a", "b", "c"};
  emb.values = {0.3, 0.0, 0.0, 0.3, -0.3, 0.0};
  auto r = synth::check_radius_monotonicity(emb, {0, 1, 2});
  CHECK(r.degenerate);
  CHECK(r.rho == 0.0);
}

TEST_CASE("spearman hand values") {
  auto plain = synth::spearman({1, 2, 3}, {3, 1, 2});
  CHECK(!plain.degenerate);
  CHECK(plain.rho == doctest::Approx(-0.5).epsilon(1e-12));

  // ties: x ranks (1.5, 1.5, 3), y ranks (1, 2, 3) -> rho = sqrt(3)/2
  auto tied = synth::spearman({1, 1, 2}, {1, 2, 3});
  CHECK(tied.rho == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));

  auto anti = synth::spearman({1, 2, 3, 4}, {4, 3, 2, 1});
  CHECK(anti.rho == doctest::Approx(-1.0).epsilon(1e-12));

  auto flat = synth::spearman({2, 2, 2}, {1, 2, 3});
  CHECK(flat.degenerate);
}

TEST_CASE("tree records ingest back to the same tree") {
  auto tree = synth::ideal_tree_embedding({}, 2, 5);
  auto records = synth::tree_records(tree);
  REQUIRE(records.size() == 120);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].value == 1.0);
    if (i > 0) CHECK(records[i].timestamp > records[i - 1].timestamp);
  }
  auto g = txgraph::build_graph(records);
  CHECK(g.node_count() == 121);
  CHECK(g.trainable_edges().size() == 120);
  // the tree's node names survive the round trip
  for (const auto& name : tree.embedding.node_names) {
    CHECK(g.node_of.count(name) == 1);
  }
}

TEST_CASE("planted graph labels every participant once") {
  synth::PlantedRoleSpec spec;
  auto planted = synth::generate_planted_graph(spec);
  REQUIRE(planted.labels.size() == 112);  // 2 hubs + 10 relays + 100 traders
  std::size_t hubs = 0, relays = 0, traders = 0;
  std::set<std::string> seen;
  for (const auto& l : planted.labels) {
    CHECK(seen.insert(l.address).second);
    if (l.role == Role::Treasury) ++hubs;
    if (l.role == Role::Bot) ++relays;
    if (l.role == Role::Trader) ++traders;
  }
  CHECK(hubs == 2);
  CHECK(relays == 10);
  CHECK(traders == 100);

  // defaults land near 3000 transfers
  CHECK(planted.records.size() >= 2500);
  CHECK(planted.records.size() <= 3500);

  // every record endpoint is a labeled address
  for (const auto& r : planted.records) {
    CHECK(seen.count(r.from) == 1);
    CHECK(seen.count(r.to) == 1);
    CHECK(r.value > 0.0);
    CHECK(r.timestamp >= spec.t_start);
    CHECK(r.timestamp <= spec.t_start + spec.t_span);
  }
}

TEST_CASE("planted generation is seed-deterministic") {
  synth::PlantedRoleSpec spec;
  spec.seed = 3;
  auto a = synth::generate_planted_graph(spec);
  auto b = synth::generate_planted_graph(spec);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].tx_id == b.records[i].tx_id);
    CHECK(a.records[i].value == b.records[i].value);
    CHECK(a.records[i].timestamp == b.records[i].timestamp);
  }
  spec.seed = 4;
  auto c = synth::generate_planted_graph(spec);
  bool differs = a.records.size() != c.records.size();
  for (std::size_t i = 0; !differs && i < a.records.size(); ++i) {
    differs = a.records[i].value != c.records[i].value ||
              a.records[i].timestamp != c.records[i].timestamp;
  }
  CHECK(differs);
}

TEST_CASE("planted csv round trips to an identical graph") {
  synth::PlantedRoleSpec spec;
  spec.n_traders = 20;
  spec.seed = 6;
  auto planted = synth::generate_planted_graph(spec);
  const std::string path = testutil::tmp_file("synth", "planted.csv");
  txgraph::write_transactions_csv(path, planted.records);
  auto back = txgraph::ingest_transactions(path, {});
  CHECK(back.skipped == 0);
  REQUIRE(back.records.size() == planted.records.size());
  auto g1 = txgraph::build_graph(planted.records);
  auto g2 = txgraph::build_graph(back.records);
  CHECK(g1.addresses == g2.addresses);
  CHECK(g1.multi_edges.size() == g2.multi_edges.size());
}

TEST_CASE("hubs out-degree the traders across seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    synth::PlantedRoleSpec spec;
    spec.n_traders = 40;
    spec.seed = seed;
    auto planted = synth::generate_planted_graph(spec);
    auto g = txgraph::build_graph(planted.records);
    std::map<std::string, Role> role_of;
    for (const auto& l : planted.labels) role_of[l.address] = l.role;
    std::size_t min_hub_degree = g.node_count();
    std::vector<std::size_t> trader_degrees;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      auto role = role_of.at(g.addresses[v]);
      auto deg = g.degree(static_cast<txgraph::NodeId>(v));
      if (role == Role::Treasury) min_hub_degree = std::min(min_hub_degree, deg);
      if (role == Role::Trader) trader_degrees.push_back(deg);
    }
    std::sort(trader_degrees.begin(), trader_degrees.end());
    auto median = trader_degrees[trader_degrees.size() / 2];
    CHECK(min_hub_degree > median);
  }
}

TEST_CASE("shipped role rules recover the planted labels") {
  auto rules = bucketing::load_role_rules(std::string(POINCAVEC_DATA_DIR) +
                                          "/rules/roles.rules");
  synth::PlantedRoleSpec spec;
  spec.seed = 1;
  auto planted = synth::generate_planted_graph(spec);
  for (const auto& l : planted.labels) {
    CHECK(bucketing::assign_role(l.name_tag, rules) == l.role);
  }
}

}  // TEST_SUITE
