// Transaction ingestion and the address graph every downstream stage
// consumes. Node ids follow sorted address order, so graphs built from the
// same record multiset are identical regardless of input ordering.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poincavec/bucketing.hpp"
#include "poincavec/records.hpp"

namespace poincavec::txgraph {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;  // directed (from, to)

struct ColumnSchema {
  std::string chain = "chain";
  std::string token = "token";
  std::string tx_id = "tx_id";
  std::string timestamp = "timestamp";
  std::string from = "from";
  std::string to = "to";
  std::string value = "value";
  std::string function_name = "function_name";
};

struct IngestResult {
  std::vector<TransactionRecord> records;
  std::size_t skipped = 0;  // rows with unparseable value or timestamp
};

// Missing header names -> MissingColumn; header-only file -> EmptyFile.
IngestResult ingest_transactions(const std::string& path,
                                 const ColumnSchema& schema = {});
IngestResult ingest_transactions_text(std::string_view csv_text,
                                      const ColumnSchema& schema = {},
                                      std::string_view origin = "<memory>");

struct Transfer {
  double value = 0.0;
  std::int64_t timestamp = 0;
};

struct TxGraph {
  std::vector<std::string> addresses;  // id -> address, ascending
  std::unordered_map<std::string, NodeId> node_of;
  // directed simple edges with their per-transaction transfers sorted by
  // timestamp (ties keep input order); self-loops are kept here
  std::map<Edge, std::vector<Transfer>> multi_edges;
  // undirected adjacency, deduplicated, sorted, self excluded
  std::vector<std::vector<NodeId>> neighbors;
  std::int64_t min_timestamp = 0;
  std::int64_t max_timestamp = 0;

  std::size_t node_count() const { return addresses.size(); }
  std::size_t degree(NodeId v) const { return neighbors[v].size(); }
  std::size_t max_degree() const;
  // directed simple edges excluding self-loops, ascending
  std::vector<Edge> trainable_edges() const;
};

// records must be non-empty -> EmptyInput
TxGraph build_graph(const std::vector<TransactionRecord>& records);

struct SummaryRow {
  std::string token;
  std::string chain;
  std::size_t tx_count = 0;
  std::size_t address_count = 0;  // distinct senders + recipients
  std::int64_t first_ts = 0;
  std::int64_t last_ts = 0;
};

// one row per (token, chain) pair present, both keys ascending
std::vector<SummaryRow> summarize(const std::vector<TransactionRecord>& records);

struct LabelResult {
  std::vector<LabeledAddress> labels;
  std::size_t duplicates_dropped = 0;  // repeated addresses past the first
};

// CSV with columns address,name; roles assigned through the rule set
LabelResult load_labels(const std::string& path,
                        const bucketing::RoleRuleSet& rules);
LabelResult parse_labels_text(std::string_view csv_text,
                              const bucketing::RoleRuleSet& rules,
                              std::string_view origin = "<memory>");

// reference corpus shape used as a sanity target for real exports
struct ProfileExpectation {
  std::size_t transactions = 10055;
  std::size_t addresses = 815;
  std::size_t traders = 520;
  std::size_t bots = 33;
  std::size_t treasuries = 44;
  std::size_t others = 218;
};

struct ProfileLine {
  std::string name;
  std::size_t expected = 0;
  std::size_t observed = 0;
};

std::vector<ProfileLine> dataset_profile(
    const std::vector<TransactionRecord>& records,
    const std::vector<LabeledAddress>& labels,
    const ProfileExpectation& expect = {});

void write_transactions_csv(const std::string& path,
                            const std::vector<TransactionRecord>& records);
void write_summary_csv(const std::string& path,
                       const std::vector<SummaryRow>& rows);
void write_labels_csv(const std::string& path,
                      const std::vector<LabeledAddress>& labels);
std::vector<LabeledAddress> read_labeled_csv(const std::string& path);

}  // namespace poincavec::txgraph
