#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "poincavec/bucketing.hpp"
#include "poincavec/errors.hpp"
#include "poincavec/rng.hpp"
#include "poincavec/txgraph.hpp"
#include "test_util.hpp"

using namespace poincavec;
using testutil::rec;

namespace {

const bucketing::RoleRuleSet& shipped_roles() {
  static bucketing::RoleRuleSet rules =
      bucketing::load_role_rules(std::string(POINCAVEC_DATA_DIR) +
                                 "/rules/roles.rules");
  return rules;
}

}  // namespace

TEST_SUITE("txgraph") {

TEST_CASE("ingest keeps valid rows and counts skipped ones") {
  const char* csv =
      "chain,token,tx_id,timestamp,from,to,value,function_name\n"
      "eth,USDY,t1,100,A,B,5.5,transfer\n";
  auto one = txgraph::ingest_transactions_text(csv);
  REQUIRE(one.records.size() == 1);
  CHECK(one.skipped == 0);
  CHECK(one.records[0].from == "A");
  CHECK(one.records[0].value == 5.5);

  const char* with_bad =
      "chain,token,tx_id,timestamp,from,to,value,function_name\n"
      "eth,USDY,t1,100,A,B,5.5,transfer\n"
      "eth,USDY,t2,101,A,B,abc,transfer\n"
      "eth,USDY,t3,oops,A,B,1.0,transfer\n";
  auto res = txgraph::ingest_transactions_text(with_bad);
  CHECK(res.records.size() == 1);
  CHECK(res.skipped == 2);
}

TEST_CASE("ingest schema errors") {
  try {
    txgraph::ingest_transactions_text("chain,token\n1,2\n");
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingColumn);
  }
  try {
    txgraph::ingest_transactions_text(
        "chain,token,tx_id,timestamp,from,to,value,function_name\n"
        "eth,USDY,t1,bad,A,B,bad,transfer\n");
    FAIL("expected EmptyFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyFile);
  }
  // renamed columns resolve through the schema mapping
  txgraph::ColumnSchema schema;
  schema.from = "sender";
  schema.to = "recipient";
  auto res = txgraph::ingest_transactions_text(
      "chain,token,tx_id,timestamp,sender,recipient,value,function_name\n"
      "eth,USDY,t1,100,A,B,1,transfer\n",
      schema);
  CHECK(res.records[0].from == "A");
  CHECK(res.records[0].to == "B");
}

TEST_CASE("repeated transfers collapse to one simple edge") {
  auto g = txgraph::build_graph(
      {rec("A", "B", 1, 30), rec("A", "B", 2, 10), rec("A", "B", 3, 20)});
  CHECK(g.node_count() == 2);
  REQUIRE(g.multi_edges.size() == 1);
  const auto& transfers = g.multi_edges.begin()->second;
  REQUIRE(transfers.size() == 3);
  CHECK(transfers[0].timestamp == 10);  // sorted by time
  CHECK(transfers[2].timestamp == 30);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
}

TEST_CASE("reciprocal edges stay directed but share one neighbor") {
  auto g = txgraph::build_graph({rec("A", "B", 1, 1), rec("B", "A", 2, 2)});
  CHECK(g.multi_edges.size() == 2);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
}

TEST_CASE("self-loops are kept as transfers but carry no degree") {
  auto g = txgraph::build_graph({rec("A", "A", 1, 1)});
  CHECK(g.node_count() == 1);
  CHECK(g.multi_edges.count({0, 0}) == 1);
  CHECK(g.degree(0) == 0);
  CHECK(g.trainable_edges().empty());

  auto g2 = txgraph::build_graph({rec("A", "A", 1, 1), rec("B", "C", 2, 2)});
  auto edges = g2.trainable_edges();
  REQUIRE(edges.size() == 1);
  CHECK(g2.addresses[edges[0].first] == "B");
}

TEST_CASE("graph construction is order-insensitive") {
  std::vector<TransactionRecord> records;
  Rng rng(20);
  const char* names[] = {"A", "B", "C", "D", "E"};
  for (int i = 0; i < 40; ++i) {
    auto u = names[rng.next_below(5)];
    auto v = names[rng.next_below(5)];
    records.push_back(rec(u, v, rng.uniform(1, 100), 1000 + i));
  }
  auto base = txgraph::build_graph(records);
  for (int trial = 0; trial < 5; ++trial) {
    auto shuffled = records;
    rng.shuffle(shuffled);
    auto g = txgraph::build_graph(shuffled);
    CHECK(g.addresses == base.addresses);
    CHECK(g.neighbors == base.neighbors);
    REQUIRE(g.multi_edges.size() == base.multi_edges.size());
    // distinct timestamps make even the transfer lists identical
    for (const auto& [edge, transfers] : base.multi_edges) {
      const auto& other = g.multi_edges.at(edge);
      REQUIRE(other.size() == transfers.size());
      for (std::size_t i = 0; i < transfers.size(); ++i) {
        CHECK(other[i].timestamp == transfers[i].timestamp);
        CHECK(other[i].value == transfers[i].value);
      }
    }
  }
}

TEST_CASE("transfer counts are conserved") {
  std::vector<TransactionRecord> records;
  Rng rng(21);
  const char* names[] = {"A", "B", "C", "D"};
  for (int i = 0; i < 60; ++i) {
    records.push_back(rec(names[rng.next_below(4)], names[rng.next_below(4)],
                          1.0, 100 + i));
  }
  auto g = txgraph::build_graph(records);
  std::size_t total = 0;
  for (const auto& [edge, transfers] : g.multi_edges) total += transfers.size();
  CHECK(total == records.size());
  CHECK(txgraph::build_graph({rec("A", "B", 1, 1)}).max_degree() == 1);
  CHECK_THROWS_AS(txgraph::build_graph({}), Error);
}

TEST_CASE("summarize aggregates per token and chain") {
  CHECK(txgraph::summarize({}).empty());
  auto rows = txgraph::summarize({rec("A", "B", 1, 50), rec("A", "C", 2, 60)});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].tx_count == 2);
  CHECK(rows[0].address_count == 3);
  CHECK(rows[0].first_ts == 50);
  CHECK(rows[0].last_ts == 60);

  // two groups, keys ascending
  auto r1 = rec("A", "B", 1, 5);
  auto r2 = rec("A", "B", 1, 6);
  r2.token = "AAA";
  auto grouped = txgraph::summarize({r1, r2});
  REQUIRE(grouped.size() == 2);
  CHECK(grouped[0].token == "AAA");
  CHECK(grouped[1].token == "TOK");

  Rng rng(22);
  std::vector<TransactionRecord> records;
  for (int i = 0; i < 30; ++i) {
    records.push_back(rec("N" + std::to_string(rng.next_below(9)),
                          "N" + std::to_string(rng.next_below(9)), 1.0, i));
  }
  for (const auto& row : txgraph::summarize(records)) {
    CHECK(row.address_count <= 2 * row.tx_count);
  }
}

TEST_CASE("labels resolve roles and drop duplicate addresses") {
  auto res = txgraph::parse_labels_text(
      "address,name\n"
      "0xabc,Gnosis Safe owner\n"
      "0xdef,weather station\n"
      "0xabc,listed twice\n",
      shipped_roles());
  REQUIRE(res.labels.size() == 2);
  CHECK(res.duplicates_dropped == 1);
  CHECK(res.labels[0].role == Role::Treasury);
  CHECK(res.labels[1].role == Role::Other);
  CHECK(res.labels[0].name_tag == "Gnosis Safe owner");
}

TEST_CASE("dataset profile reports observed against reference counts") {
  auto empty = txgraph::dataset_profile({}, {});
  REQUIRE(empty.size() == 6);
  CHECK(empty[0].name == "transactions");
  CHECK(empty[0].expected == 10055);
  CHECK(empty[0].observed == 0);
  CHECK(empty[1].expected == 815);
  CHECK(empty[2].expected == 520);
  CHECK(empty[3].expected == 33);
  CHECK(empty[4].expected == 44);
  CHECK(empty[5].expected == 218);

  std::vector<LabeledAddress> labels{{"A", Role::Trader, "t"},
                                     {"B", Role::Bot, "b"},
                                     {"C", Role::Trader, "t"}};
  auto lines = txgraph::dataset_profile({rec("A", "B", 1, 1)}, labels);
  CHECK(lines[0].observed == 1);
  CHECK(lines[1].observed == 2);
  CHECK(lines[2].observed == 2);  // traders
  CHECK(lines[3].observed == 1);  // bots
}

TEST_CASE("transaction csv writes round trip through ingest") {
  std::vector<TransactionRecord> records{
      rec("A", "B", 1.0 / 3.0, 100, "transfer"),
      rec("B", "C", 12345.678901234567, 200, "swapAndStartBridge")};
  const std::string path = testutil::tmp_file("txgraph", "roundtrip.csv");
  txgraph::write_transactions_csv(path, records);
  auto back = txgraph::ingest_transactions(path);
  REQUIRE(back.records.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.records[i].from == records[i].from);
    CHECK(back.records[i].to == records[i].to);
    CHECK(back.records[i].value == records[i].value);  // bitwise via %.17g
    CHECK(back.records[i].timestamp == records[i].timestamp);
    CHECK(back.records[i].function_name == records[i].function_name);
  }
}

TEST_CASE("labeled csv writes round trip") {
  std::vector<LabeledAddress> labels{{"A", Role::Trader, "dex trader"},
                                     {"B", Role::Treasury, "Gnosis Safe"}};
  const std::string path = testutil::tmp_file("txgraph", "labels.csv");
  txgraph::write_labels_csv(path, labels);
  auto back = txgraph::read_labeled_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].role == Role::Trader);
  CHECK(back[1].role == Role::Treasury);
  CHECK(back[1].name_tag == "Gnosis Safe");
}

}  // TEST_SUITE
