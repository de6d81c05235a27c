#include "poincavec/bucketing.hpp"

#include <algorithm>
#include <map>

#include "poincavec/csv.hpp"
#include "poincavec/errors.hpp"

namespace poincavec::bucketing {

namespace {

struct RawRule {
  std::string key;
  std::vector<std::string> patterns;
};

std::vector<RawRule> parse_rule_lines(std::string_view text,
                                      std::string_view origin) {
  std::vector<RawRule> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t tab = stripped.find('\t');
    if (tab == std::string::npos) {
      fail(ErrorCode::BadRuleFile,
           std::string(origin) + ":" + std::to_string(line_no) +
               ": expected '<key>\\t<patterns>'");
    }
    RawRule rule;
    rule.key = trim(std::string_view(stripped).substr(0, tab));
    std::string rest = trim(std::string_view(stripped).substr(tab + 1));
    std::size_t start = 0;
    while (start <= rest.size()) {
      std::size_t comma = rest.find(',', start);
      std::string pat = trim(std::string_view(rest).substr(
          start,
          comma == std::string::npos ? rest.size() - start : comma - start));
      if (!pat.empty()) rule.patterns.push_back(lowercase(pat));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rule.key.empty() || rule.patterns.empty()) {
      fail(ErrorCode::BadRuleFile,
           std::string(origin) + ":" + std::to_string(line_no) +
               ": empty key or pattern list");
    }
    out.push_back(std::move(rule));
  }
  return out;
}

}  // namespace

BucketRuleSet parse_bucket_rules(std::string_view text,
                                 std::string_view origin) {
  BucketRuleSet set;
  for (auto& raw : parse_rule_lines(text, origin)) {
    set.rules.push_back(BucketRule{std::move(raw.key), std::move(raw.patterns)});
  }
  if (set.rules.empty()) {
    fail(ErrorCode::BadRuleFile, std::string(origin) + ": no rules");
  }
  return set;
}

BucketRuleSet load_bucket_rules(const std::string& path) {
  return parse_bucket_rules(read_text_file(path), path);
}

std::string_view assign_bucket(std::string_view function_name,
                               const BucketRuleSet& rules) {
  std::string lowered = lowercase(function_name);
  for (const auto& rule : rules.rules) {
    for (const auto& pat : rule.patterns) {
      if (lowered.find(pat) != std::string::npos) return rule.bucket;
    }
  }
  return rules.fallback;
}

RoleRuleSet parse_role_rules(std::string_view text, std::string_view origin) {
  RoleRuleSet set;
  for (auto& raw : parse_rule_lines(text, origin)) {
    auto role = role_from_string(raw.key);
    if (!role) {
      fail(ErrorCode::BadRuleFile,
           std::string(origin) + ": unknown role '" + raw.key + "'");
    }
    set.rules.push_back(RoleRule{*role, std::move(raw.patterns)});
  }
  if (set.rules.empty()) {
    fail(ErrorCode::BadRuleFile, std::string(origin) + ": no rules");
  }
  return set;
}

RoleRuleSet load_role_rules(const std::string& path) {
  return parse_role_rules(read_text_file(path), path);
}

Role assign_role(std::string_view name_tag, const RoleRuleSet& rules) {
  std::string lowered = lowercase(name_tag);
  for (const auto& rule : rules.rules) {
    for (const auto& pat : rule.patterns) {
      if (lowered.find(pat) != std::string::npos) return rule.role;
    }
  }
  return Role::Other;
}

std::vector<ReportRow> function_chain_report(
    const std::vector<TransactionRecord>& records, const BucketRuleSet& rules) {
  std::map<std::pair<std::string, std::string>, ReportRow> acc;
  for (const auto& rec : records) {
    std::string bucket(assign_bucket(rec.function_name, rules));
    auto key = std::make_pair(bucket, rec.chain);
    auto it = acc.find(key);
    if (it == acc.end()) {
      ReportRow row;
      row.bucket = bucket;
      row.chain = rec.chain;
      row.tx_count = 1;
      row.total_value = rec.value;
      row.first_seen = rec.timestamp;
      row.last_seen = rec.timestamp;
      acc.emplace(std::move(key), std::move(row));
    } else {
      ReportRow& row = it->second;
      row.tx_count += 1;
      row.total_value += rec.value;
      row.first_seen = std::min(row.first_seen, rec.timestamp);
      row.last_seen = std::max(row.last_seen, rec.timestamp);
    }
  }
  std::vector<ReportRow> out;
  out.reserve(acc.size());
  for (auto& [key, row] : acc) out.push_back(std::move(row));
  return out;
}

}  // namespace poincavec::bucketing
