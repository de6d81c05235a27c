#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "poincavec/synth.hpp"
#include "poincavec/txgraph.hpp"
#include "poincavec/walkfeat.hpp"
#include "test_util.hpp"

using namespace poincavec;
using testutil::rec;

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb) + 1e-300);
}

}  // namespace

TEST_SUITE("walkfeat") {

TEST_CASE("isolated nodes yield singleton walks") {
  // self-loop keeps D in the graph but leaves it without neighbors
  auto g = txgraph::build_graph({rec("A", "B", 1, 1), rec("D", "D", 1, 2)});
  auto d = g.node_of.at("D");
  walkfeat::WalkConfig cfg;
  cfg.walks_per_node = 3;
  cfg.walk_length = 5;
  auto walks = walkfeat::generate_walks(g, cfg);
  REQUIRE(walks.size() == g.node_count() * cfg.walks_per_node);
  std::size_t singletons = 0;
  for (const auto& w : walks) {
    REQUIRE(!w.empty());
    if (w.front() == d) {
      CHECK(w.size() == 1);
      ++singletons;
    }
  }
  CHECK(singletons == cfg.walks_per_node);
}

TEST_CASE("two-node path forces strict alternation") {
  auto g = txgraph::build_graph({rec("A", "B", 1, 1)});
  walkfeat::WalkConfig cfg;
  cfg.walk_length = 6;
  cfg.walks_per_node = 4;
  auto walks = walkfeat::generate_walks(g, cfg);
  for (const auto& w : walks) {
    REQUIRE(w.size() == 6);
    for (std::size_t i = 1; i < w.size(); ++i) {
      CHECK(w[i] != w[i - 1]);
      CHECK(w[i] < 2);
    }
  }
}

TEST_CASE("walk corpus size and shape on the ideal tree") {
  synth::TreeSpec spec;  // branching 3 depth 4: 121 nodes
  auto tree = synth::ideal_tree_embedding(spec, 2, 0);
  auto g = txgraph::build_graph(synth::tree_records(tree));
  REQUIRE(g.node_count() == 121);
  walkfeat::WalkConfig cfg;  // defaults: 10 walks of length 5 per node
  auto walks = walkfeat::generate_walks(g, cfg);
  CHECK(walks.size() == 1210);
  for (const auto& w : walks) {
    CHECK(w.size() == 5);
    for (std::size_t i = 1; i < w.size(); ++i) {
      // consecutive nodes share an undirected edge
      const auto& nbs = g.neighbors[w[i - 1]];
      CHECK(std::find(nbs.begin(), nbs.end(), w[i]) != nbs.end());
    }
  }
  // every node starts exactly walks_per_node walks, grouped in node order
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    for (std::size_t j = 0; j < cfg.walks_per_node; ++j) {
      CHECK(walks[v * cfg.walks_per_node + j].front() == v);
    }
  }
}

TEST_CASE("walk generation is seed-deterministic") {
  auto g = txgraph::build_graph({rec("A", "B", 1, 1), rec("B", "C", 1, 2),
                                 rec("C", "A", 1, 3), rec("C", "D", 1, 4)});
  walkfeat::WalkConfig cfg;
  cfg.seed = 9;
  auto w1 = walkfeat::generate_walks(g, cfg);
  auto w2 = walkfeat::generate_walks(g, cfg);
  CHECK(w1 == w2);
  cfg.seed = 10;
  auto w3 = walkfeat::generate_walks(g, cfg);
  CHECK(w1 != w3);
}

TEST_CASE("steps from a star center are uniform over the leaves") {
  // chi-squared over first steps from the hub; df=3 crit 16.266 at p=0.001
  auto g = txgraph::build_graph({rec("C", "L1", 1, 1), rec("C", "L2", 1, 2),
                                 rec("C", "L3", 1, 3), rec("C", "L4", 1, 4)});
  auto c = g.node_of.at("C");
  walkfeat::WalkConfig cfg;
  cfg.walk_length = 2;
  cfg.walks_per_node = 2500;
  cfg.seed = 3;
  auto walks = walkfeat::generate_walks(g, cfg);
  std::array<double, 5> counts{};
  for (const auto& w : walks) {
    if (w.front() != c) continue;
    REQUIRE(w.size() == 2);
    counts[w[1]] += 1.0;
  }
  CHECK(counts[c] == 0.0);
  const double expect = 2500.0 / 4.0;
  double chi2 = 0.0;
  for (std::size_t v = 0; v < 5; ++v) {
    if (v == c) continue;
    chi2 += (counts[v] - expect) * (counts[v] - expect) / expect;
  }
  CHECK(chi2 < 16.266);
}

TEST_CASE("skip-gram separates two disconnected cliques") {
  std::vector<TransactionRecord> records;
  std::int64_t ts = 1;
  auto clique = [&](const std::string& prefix) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        records.push_back(rec(prefix + std::to_string(i),
                              prefix + std::to_string(j), 1.0, ts++));
      }
    }
  };
  clique("a");
  clique("b");
  auto g = txgraph::build_graph(records);
  walkfeat::WalkConfig cfg;
  cfg.dim = 8;
  cfg.walk_length = 6;
  cfg.walks_per_node = 40;
  cfg.epochs = 12;
  cfg.seed = 7;
  auto walks = walkfeat::generate_walks(g, cfg);
  auto emb = walkfeat::train_walk_embeddings(walks, g, cfg);
  REQUIRE(emb.dim == 8);
  REQUIRE(emb.node_names == g.addresses);
  CHECK(emb.all_finite());

  std::vector<std::size_t> ca, cb;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    (g.addresses[v][0] == 'a' ? ca : cb).push_back(v);
  }
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  for (auto u : ca) {
    for (auto v : ca) {
      if (u < v) intra += cosine(emb.row(u), emb.row(v)), ++n_intra;
    }
  }
  for (auto u : cb) {
    for (auto v : cb) {
      if (u < v) intra += cosine(emb.row(u), emb.row(v)), ++n_intra;
    }
  }
  for (auto u : ca) {
    for (auto v : cb) inter += cosine(emb.row(u), emb.row(v)), ++n_inter;
  }
  intra /= static_cast<double>(n_intra);
  inter /= static_cast<double>(n_inter);
  CHECK(intra > inter);
}

TEST_CASE("training is seed-deterministic") {
  auto g = txgraph::build_graph({rec("A", "B", 1, 1), rec("B", "C", 1, 2),
                                 rec("C", "A", 1, 3)});
  walkfeat::WalkConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 3;
  cfg.seed = 21;
  auto walks = walkfeat::generate_walks(g, cfg);
  auto e1 = walkfeat::train_walk_embeddings(walks, g, cfg);
  auto e2 = walkfeat::train_walk_embeddings(walks, g, cfg);
  CHECK(e1.values == e2.values);
}

}  // TEST_SUITE
