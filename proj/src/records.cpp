#include "poincavec/records.hpp"

namespace poincavec {

const char* to_string(Role role) {
  switch (role) {
    case Role::Trader: return "Trader";
    case Role::Bot: return "Bot";
    case Role::Treasury: return "Treasury";
    case Role::Other: return "Other";
  }
  return "Other";
}

std::optional<Role> role_from_string(std::string_view text) {
  if (text == "Trader") return Role::Trader;
  if (text == "Bot") return Role::Bot;
  if (text == "Treasury") return Role::Treasury;
  if (text == "Other") return Role::Other;
  return std::nullopt;
}

}  // namespace poincavec
