// Golden pattern inventories for the shipped rule files, shared between the
// unit suite and the acceptance gate. Each list is the complete expected
// pattern set of its file; coverage checks compare multisets so a missing or
// extra pattern in the file fails loudly.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "poincavec/bucketing.hpp"
#include "poincavec/records.hpp"

namespace goldens {

struct BucketGold {
  const char* pattern;
  const char* bucket;
};

// full pattern inventory of the custodial-issuance rule file
inline const std::vector<BucketGold> kIssuanceInventory = {
    {"issue", "issuetokens"},   {"mint", "issuetokens"},
    {"bulkissuance", "issuetokens"},
    {"redeem", "redeem"},       {"burn", "burn"},
    {"transfer", "transfer"},   {"bridgedstokens", "transfer"},
    {"multisend", "transfer"},  {"deposit", "deposit"},
    {"deliver", "deliver"},
};

// full pattern inventory of the DeFi rule file
inline const std::vector<BucketGold> kDefiInventory = {
    {"swap", "swap"},           {"unoswap", "swap"},
    {"swaptoken", "swap"},      {"add_liquidity", "liquidity"},
    {"removeliquidity", "liquidity"},
    {"lend", "lending"},        {"borrow", "lending"},
    {"repay", "lending"},       {"loan", "lending"},
    {"collateral", "lending"},  {"transfer", "transfer"},
    {"transfertoken", "transfer"},
    {"safetransfer", "transfer"},
    {"bridge", "bridge"},       {"startbridge", "bridge"},
    {"swapandstartbridge", "bridge"},
    {"mint", "mint"},           {"burn", "burn"},
    {"claim", "rewards"},       {"harvest", "rewards"},
    {"reward", "rewards"},      {"collect", "rewards"},
    {"vote", "governance"},     {"governance", "governance"},
    {"executemeta", "execution"},
    {"execute", "execution"},   {"exectransaction", "execution"},
    {"delegatecall", "execution"},
    {"call", "execution"},      {"multicall", "execution"},
    {"approve", "approval"},    {"permit", "approval"},
    {"register", "configuration"},
    {"set_", "configuration"},  {"init", "configuration"},
    {"config", "configuration"},
};

struct RoleGold {
  const char* pattern;
  poincavec::Role role;
};

// full pattern inventory of the role rule file
inline const std::vector<RoleGold> kRoleInventory = {
    {"sandwich attacker", poincavec::Role::Bot},
    {"arbitrage", poincavec::Role::Bot},
    {"mev", poincavec::Role::Bot},
    {"flashloan", poincavec::Role::Bot},
    {"flashbots", poincavec::Role::Bot},
    {"safe", poincavec::Role::Treasury},
    {"gnosis safe", poincavec::Role::Treasury},
    {"multisig", poincavec::Role::Treasury},
    {"dao treasury", poincavec::Role::Treasury},
    {"vault", poincavec::Role::Treasury},
    {"zerion multisig", poincavec::Role::Treasury},
    {"dex trader", poincavec::Role::Trader},
    {"aggregator trader", poincavec::Role::Trader},
    {"nft trader", poincavec::Role::Trader},
    {"daily trader", poincavec::Role::Trader},
    {"number of dexs traded", poincavec::Role::Trader},
};

inline std::multiset<std::string> file_patterns(
    const poincavec::bucketing::BucketRuleSet& rules) {
  std::multiset<std::string> out;
  for (const auto& rule : rules.rules) {
    for (const auto& p : rule.patterns) out.insert(p);
  }
  return out;
}

inline std::multiset<std::string> file_patterns(
    const poincavec::bucketing::RoleRuleSet& rules) {
  std::multiset<std::string> out;
  for (const auto& rule : rules.rules) {
    for (const auto& p : rule.patterns) out.insert(p);
  }
  return out;
}

}  // namespace goldens
