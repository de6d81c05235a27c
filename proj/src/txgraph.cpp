#include "poincavec/txgraph.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "poincavec/csv.hpp"
#include "poincavec/errors.hpp"

namespace poincavec::txgraph {

namespace {

std::size_t require_column(const CsvTable& table, const std::string& name,
                           std::string_view origin) {
  auto idx = table.column(name);
  if (!idx) {
    fail(ErrorCode::MissingColumn,
         std::string(origin) + ": missing column '" + name + "'");
  }
  return *idx;
}

IngestResult ingest_table(const CsvTable& table, const ColumnSchema& schema,
                          std::string_view origin) {
  std::size_t c_chain = require_column(table, schema.chain, origin);
  std::size_t c_token = require_column(table, schema.token, origin);
  std::size_t c_tx = require_column(table, schema.tx_id, origin);
  std::size_t c_ts = require_column(table, schema.timestamp, origin);
  std::size_t c_from = require_column(table, schema.from, origin);
  std::size_t c_to = require_column(table, schema.to, origin);
  std::size_t c_value = require_column(table, schema.value, origin);
  std::size_t c_fn = require_column(table, schema.function_name, origin);
  std::size_t max_col = std::max({c_chain, c_token, c_tx, c_ts, c_from, c_to,
                                  c_value, c_fn});

  IngestResult result;
  result.records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.size() <= max_col) {
      ++result.skipped;
      continue;
    }
    auto ts = parse_int64(trim(row[c_ts]));
    auto value = parse_double(trim(row[c_value]));
    if (!ts || !value) {
      ++result.skipped;
      continue;
    }
    TransactionRecord rec;
    rec.chain = row[c_chain];
    rec.token = row[c_token];
    rec.tx_id = row[c_tx];
    rec.timestamp = *ts;
    rec.from = row[c_from];
    rec.to = row[c_to];
    rec.value = *value;
    rec.function_name = row[c_fn];
    result.records.push_back(std::move(rec));
  }
  if (result.records.empty()) {
    fail(ErrorCode::EmptyFile,
         std::string(origin) + ": no data rows survive parsing");
  }
  return result;
}

}  // namespace

IngestResult ingest_transactions(const std::string& path,
                                 const ColumnSchema& schema) {
  return ingest_table(read_csv(path), schema, path);
}

IngestResult ingest_transactions_text(std::string_view csv_text,
                                      const ColumnSchema& schema,
                                      std::string_view origin) {
  return ingest_table(parse_csv(csv_text, origin), schema, origin);
}

std::size_t TxGraph::max_degree() const {
  std::size_t m = 0;
  for (const auto& adj : neighbors) m = std::max(m, adj.size());
  return m;
}

std::vector<Edge> TxGraph::trainable_edges() const {
  std::vector<Edge> out;
  out.reserve(multi_edges.size());
  for (const auto& [edge, transfers] : multi_edges) {
    if (edge.first != edge.second) out.push_back(edge);
  }
  return out;
}

TxGraph build_graph(const std::vector<TransactionRecord>& records) {
  if (records.empty()) {
    fail(ErrorCode::EmptyInput, "no transactions to build a graph from");
  }
  TxGraph g;
  {
    std::set<std::string> addrs;
    for (const auto& rec : records) {
      addrs.insert(rec.from);
      addrs.insert(rec.to);
    }
    g.addresses.assign(addrs.begin(), addrs.end());
  }
  g.node_of.reserve(g.addresses.size());
  for (NodeId i = 0; i < g.addresses.size(); ++i) {
    g.node_of.emplace(g.addresses[i], i);
  }

  g.min_timestamp = records.front().timestamp;
  g.max_timestamp = records.front().timestamp;
  for (const auto& rec : records) {
    NodeId u = g.node_of.at(rec.from);
    NodeId v = g.node_of.at(rec.to);
    g.multi_edges[{u, v}].push_back(Transfer{rec.value, rec.timestamp});
    g.min_timestamp = std::min(g.min_timestamp, rec.timestamp);
    g.max_timestamp = std::max(g.max_timestamp, rec.timestamp);
  }
  for (auto& [edge, transfers] : g.multi_edges) {
    std::stable_sort(transfers.begin(), transfers.end(),
                     [](const Transfer& a, const Transfer& b) {
                       return a.timestamp < b.timestamp;
                     });
  }

  g.neighbors.assign(g.node_count(), {});
  for (const auto& [edge, transfers] : g.multi_edges) {
    if (edge.first == edge.second) continue;
    g.neighbors[edge.first].push_back(edge.second);
    g.neighbors[edge.second].push_back(edge.first);
  }
  for (auto& adj : g.neighbors) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

std::vector<SummaryRow> summarize(
    const std::vector<TransactionRecord>& records) {
  std::map<std::pair<std::string, std::string>, SummaryRow> acc;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> addrs;
  for (const auto& rec : records) {
    auto key = std::make_pair(rec.token, rec.chain);
    auto it = acc.find(key);
    if (it == acc.end()) {
      SummaryRow row;
      row.token = rec.token;
      row.chain = rec.chain;
      row.tx_count = 1;
      row.first_ts = rec.timestamp;
      row.last_ts = rec.timestamp;
      acc.emplace(key, std::move(row));
    } else {
      SummaryRow& row = it->second;
      row.tx_count += 1;
      row.first_ts = std::min(row.first_ts, rec.timestamp);
      row.last_ts = std::max(row.last_ts, rec.timestamp);
    }
    auto& s = addrs[key];
    s.insert(rec.from);
    s.insert(rec.to);
  }
  std::vector<SummaryRow> out;
  out.reserve(acc.size());
  for (auto& [key, row] : acc) {
    row.address_count = addrs[key].size();
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

LabelResult labels_from_table(const CsvTable& table,
                              const bucketing::RoleRuleSet& rules,
                              std::string_view origin) {
  auto c_addr = table.column("address");
  auto c_name = table.column("name");
  if (!c_addr || !c_name) {
    fail(ErrorCode::MissingColumn,
         std::string(origin) + ": labels need columns 'address' and 'name'");
  }
  LabelResult result;
  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    if (row.size() <= std::max(*c_addr, *c_name)) continue;
    const std::string& addr = row[*c_addr];
    if (!seen.insert(addr).second) {
      ++result.duplicates_dropped;
      continue;
    }
    LabeledAddress label;
    label.address = addr;
    label.name_tag = row[*c_name];
    label.role = bucketing::assign_role(label.name_tag, rules);
    result.labels.push_back(std::move(label));
  }
  return result;
}

}  // namespace

LabelResult load_labels(const std::string& path,
                        const bucketing::RoleRuleSet& rules) {
  return labels_from_table(read_csv(path), rules, path);
}

LabelResult parse_labels_text(std::string_view csv_text,
                              const bucketing::RoleRuleSet& rules,
                              std::string_view origin) {
  return labels_from_table(parse_csv(csv_text, origin), rules, origin);
}

std::vector<ProfileLine> dataset_profile(
    const std::vector<TransactionRecord>& records,
    const std::vector<LabeledAddress>& labels,
    const ProfileExpectation& expect) {
  std::set<std::string> addrs;
  for (const auto& rec : records) {
    addrs.insert(rec.from);
    addrs.insert(rec.to);
  }
  std::array<std::size_t, kRoleCount> counts{};
  for (const auto& label : labels) {
    counts[static_cast<std::size_t>(label.role)] += 1;
  }
  return {
      {"transactions", expect.transactions, records.size()},
      {"addresses", expect.addresses, addrs.size()},
      {"traders", expect.traders, counts[static_cast<std::size_t>(Role::Trader)]},
      {"bots", expect.bots, counts[static_cast<std::size_t>(Role::Bot)]},
      {"treasuries", expect.treasuries,
       counts[static_cast<std::size_t>(Role::Treasury)]},
      {"others", expect.others, counts[static_cast<std::size_t>(Role::Other)]},
  };
}

void write_transactions_csv(const std::string& path,
                            const std::vector<TransactionRecord>& records) {
  CsvWriter w(path);
  w.row({"chain", "token", "tx_id", "timestamp", "from", "to", "value",
         "function_name"});
  for (const auto& rec : records) {
    w.row({rec.chain, rec.token, rec.tx_id, std::to_string(rec.timestamp),
           rec.from, rec.to, format_double(rec.value), rec.function_name});
  }
}

void write_summary_csv(const std::string& path,
                       const std::vector<SummaryRow>& rows) {
  CsvWriter w(path);
  w.row({"token", "chain", "tx_count", "address_count", "first_date",
         "last_date"});
  for (const auto& row : rows) {
    w.row({row.token, row.chain, std::to_string(row.tx_count),
           std::to_string(row.address_count), format_date(row.first_ts),
           format_date(row.last_ts)});
  }
}

void write_labels_csv(const std::string& path,
                      const std::vector<LabeledAddress>& labels) {
  CsvWriter w(path);
  w.row({"address", "role", "name"});
  for (const auto& label : labels) {
    w.row({label.address, to_string(label.role), label.name_tag});
  }
}

std::vector<LabeledAddress> read_labeled_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  auto c_addr = table.column("address");
  auto c_role = table.column("role");
  auto c_name = table.column("name");
  if (!c_addr || !c_role) {
    fail(ErrorCode::MissingColumn,
         path + ": labeled file needs columns 'address' and 'role'");
  }
  std::vector<LabeledAddress> out;
  for (const auto& row : table.rows) {
    LabeledAddress label;
    label.address = row[*c_addr];
    auto role = role_from_string(row[*c_role]);
    if (!role) {
      fail(ErrorCode::UnknownLabel,
           path + ": unknown role '" + row[*c_role] + "'");
    }
    label.role = *role;
    if (c_name && row.size() > *c_name) label.name_tag = row[*c_name];
    out.push_back(std::move(label));
  }
  return out;
}

}  // namespace poincavec::txgraph
