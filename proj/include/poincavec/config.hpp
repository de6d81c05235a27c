// Pipeline configuration: one INI-style file covering every stage. Unknown
// sections or keys are rejected so typos surface instead of silently using
// defaults.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "poincavec/embed.hpp"
#include "poincavec/lar.hpp"
#include "poincavec/roleclf.hpp"
#include "poincavec/walkfeat.hpp"

namespace poincavec::config {

struct PipelineConfig {
  std::uint64_t seed = 42;
  std::size_t k_hop = 1;
  double test_fraction = 0.2;
  std::size_t threads = 1;
  bool deterministic = true;

  txgraph::ColumnSchema schema{};
  embed::TrainConfig embed{};
  lar::RefineConfig refine{};
  walkfeat::WalkConfig walk{};
  roleclf::ClassifierConfig classify{};

  // stage seeds derive from the root seed unless pinned in the file
  std::optional<std::uint64_t> embed_seed;
  std::optional<std::uint64_t> walk_seed;
  std::optional<std::uint64_t> classify_seed;
  std::optional<std::uint64_t> split_seed;

  std::string bucket_rules_path = "data/rules/usdy.rules";
  std::string role_rules_path = "data/rules/roles.rules";

  embed::TrainConfig embed_config() const;
  walkfeat::WalkConfig walk_config() const;
  roleclf::ClassifierConfig classify_config() const;
  std::uint64_t resolved_split_seed() const;
};

PipelineConfig parse_config(std::string_view text,
                            std::string_view origin = "<memory>");
PipelineConfig load_config(const std::string& path);

}  // namespace poincavec::config
