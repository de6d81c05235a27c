// Plain data types shared by ingestion, bucketing and labeling.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace poincavec {

struct TransactionRecord {
  std::string chain;
  std::string token;
  std::string tx_id;
  std::int64_t timestamp = 0;  // unix seconds
  std::string from;
  std::string to;
  double value = 0.0;  // token units
  std::string function_name;
};

// canonical class order; all per-class arrays and CSV columns follow it
enum class Role { Trader = 0, Bot = 1, Treasury = 2, Other = 3 };

inline constexpr std::size_t kRoleCount = 4;

const char* to_string(Role role);
std::optional<Role> role_from_string(std::string_view text);

struct LabeledAddress {
  std::string address;
  Role role = Role::Other;
  std::string name_tag;  // source string the role was derived from
};

}  // namespace poincavec
