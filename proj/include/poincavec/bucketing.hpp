// Substring rule engines: function-name -> bucket and name-tag -> role.
// Rule sets live in editable data files so new tokens don't need a rebuild.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "poincavec/records.hpp"

namespace poincavec::bucketing {

struct BucketRule {
  std::string bucket;
  std::vector<std::string> patterns;  // stored lowercased
};

struct BucketRuleSet {
  std::vector<BucketRule> rules;
  std::string fallback = "unknown";
};

// File format: one rule per line, "<bucket>\t<p1,p2,...>". '#' starts a
// comment, blank lines are skipped. Malformed lines -> BadRuleFile.
BucketRuleSet load_bucket_rules(const std::string& path);
BucketRuleSet parse_bucket_rules(std::string_view text,
                                 std::string_view origin = "<memory>");

// First rule (in file order) with any pattern contained in the lowercased
// name wins; within a rule, patterns are checked left to right.
std::string_view assign_bucket(std::string_view function_name,
                               const BucketRuleSet& rules);

struct RoleRule {
  Role role = Role::Other;
  std::vector<std::string> patterns;  // stored lowercased
};

struct RoleRuleSet {
  std::vector<RoleRule> rules;  // fallback is Role::Other
};

// Same file format with role names as buckets; unknown role -> BadRuleFile.
RoleRuleSet load_role_rules(const std::string& path);
RoleRuleSet parse_role_rules(std::string_view text,
                             std::string_view origin = "<memory>");

Role assign_role(std::string_view name_tag, const RoleRuleSet& rules);

struct ReportRow {
  std::string bucket;
  std::string chain;
  std::size_t tx_count = 0;
  double total_value = 0.0;
  std::int64_t first_seen = 0;
  std::int64_t last_seen = 0;
};

// One row per (bucket, chain) pair actually present, bucket-major, both
// keys ascending. Values accumulate in input order.
std::vector<ReportRow> function_chain_report(
    const std::vector<TransactionRecord>& records, const BucketRuleSet& rules);

}  // namespace poincavec::bucketing
