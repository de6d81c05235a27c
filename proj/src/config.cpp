#include "poincavec/config.hpp"

#include "poincavec/csv.hpp"
#include "poincavec/errors.hpp"
#include "poincavec/rng.hpp"

namespace poincavec::config {

embed::TrainConfig PipelineConfig::embed_config() const {
  embed::TrainConfig cfg = embed;
  cfg.seed = embed_seed.value_or(derive_seed(seed, "embed"));
  return cfg;
}

walkfeat::WalkConfig PipelineConfig::walk_config() const {
  walkfeat::WalkConfig cfg = walk;
  cfg.seed = walk_seed.value_or(derive_seed(seed, "walk"));
  return cfg;
}

roleclf::ClassifierConfig PipelineConfig::classify_config() const {
  roleclf::ClassifierConfig cfg = classify;
  cfg.seed = classify_seed.value_or(derive_seed(seed, "classify"));
  return cfg;
}

std::uint64_t PipelineConfig::resolved_split_seed() const {
  return split_seed.value_or(derive_seed(seed, "split"));
}

namespace {

[[noreturn]] void bad(std::string_view origin, std::size_t line,
                      const std::string& message) {
  fail(ErrorCode::BadConfig, std::string(origin) + ":" +
                                 std::to_string(line) + ": " + message);
}

struct Setter {
  PipelineConfig& cfg;
  std::string_view origin;
  std::size_t line = 0;
  std::string section;
  std::string key;
  std::string value;

  [[noreturn]] void unknown() const {
    bad(origin, line, "unknown key '" + key + "' in section [" + section + "]");
  }

  double as_double() const {
    auto x = parse_double(value);
    if (!x) bad(origin, line, "expected a number for '" + key + "'");
    return *x;
  }

  std::uint64_t as_u64() const {
    auto x = parse_uint64(value);
    if (!x) bad(origin, line, "expected a non-negative integer for '" + key + "'");
    return *x;
  }

  std::int64_t as_i64() const {
    auto x = parse_int64(value);
    if (!x) bad(origin, line, "expected an integer for '" + key + "'");
    return *x;
  }

  std::size_t as_size() const { return static_cast<std::size_t>(as_u64()); }

  bool as_bool() const {
    std::string v = lowercase(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad(origin, line, "expected a boolean for '" + key + "'");
  }
};

void apply(Setter& s) {
  PipelineConfig& c = s.cfg;
  const std::string& k = s.key;
  if (s.section == "pipeline") {
    if (k == "seed") c.seed = s.as_u64();
    else if (k == "k_hop") c.k_hop = s.as_size();
    else if (k == "test_fraction") c.test_fraction = s.as_double();
    else if (k == "threads") c.threads = s.as_size();
    else if (k == "deterministic") c.deterministic = s.as_bool();
    else s.unknown();
  } else if (s.section == "ingest") {
    if (k == "chain") c.schema.chain = s.value;
    else if (k == "token") c.schema.token = s.value;
    else if (k == "tx_id") c.schema.tx_id = s.value;
    else if (k == "timestamp") c.schema.timestamp = s.value;
    else if (k == "from") c.schema.from = s.value;
    else if (k == "to") c.schema.to = s.value;
    else if (k == "value") c.schema.value = s.value;
    else if (k == "function_name") c.schema.function_name = s.value;
    else s.unknown();
  } else if (s.section == "embed") {
    if (k == "dim") c.embed.dim = s.as_size();
    else if (k == "epochs") c.embed.epochs = s.as_size();
    else if (k == "margin") c.embed.margin = s.as_double();
    else if (k == "radial_weight") c.embed.radial_weight = s.as_double();
    else if (k == "learning_rate") c.embed.learning_rate = s.as_double();
    else if (k == "final_lr_fraction") c.embed.final_lr_fraction = s.as_double();
    else if (k == "negatives") c.embed.negatives_per_positive = s.as_size();
    else if (k == "init_scale") c.embed.init_scale = s.as_double();
    else if (k == "eps_boundary") c.embed.geometry.eps_boundary = s.as_double();
    else if (k == "delta_stab") c.embed.geometry.delta_stab = s.as_double();
    else if (k == "seed") c.embed_seed = s.as_u64();
    else s.unknown();
  } else if (s.section == "refine") {
    if (k == "steps") c.refine.steps = s.as_size();
    else if (k == "smoothing_eps") c.refine.smoothing_eps = s.as_double();
    else if (k == "convergence_tol") c.refine.convergence_tol = s.as_double();
    else if (k == "window_start") c.refine.window_start = s.as_i64();
    else if (k == "window_delta") c.refine.window_delta = s.as_i64();
    else s.unknown();
  } else if (s.section == "walk") {
    if (k == "walk_length") c.walk.walk_length = s.as_size();
    else if (k == "walks_per_node") c.walk.walks_per_node = s.as_size();
    else if (k == "context_size") c.walk.context_size = s.as_size();
    else if (k == "dim") c.walk.dim = s.as_size();
    else if (k == "negatives") c.walk.negatives = s.as_size();
    else if (k == "epochs") c.walk.epochs = s.as_size();
    else if (k == "learning_rate") c.walk.learning_rate = s.as_double();
    else if (k == "final_learning_rate") c.walk.final_learning_rate = s.as_double();
    else if (k == "seed") c.walk_seed = s.as_u64();
    else s.unknown();
  } else if (s.section == "classify") {
    if (k == "hidden_width") c.classify.hidden_width = s.as_size();
    else if (k == "dropout") c.classify.dropout = s.as_double();
    else if (k == "learning_rate") c.classify.learning_rate = s.as_double();
    else if (k == "weight_decay") c.classify.weight_decay = s.as_double();
    else if (k == "max_epochs") c.classify.max_epochs = s.as_size();
    else if (k == "patience") c.classify.patience = s.as_size();
    else if (k == "val_fraction") c.classify.val_fraction = s.as_double();
    else if (k == "batch_size") c.classify.batch_size = s.as_size();
    else if (k == "class_weighting") c.classify.class_weighting = s.as_bool();
    else if (k == "use_hier") c.classify.ablation.use_hier = s.as_bool();
    else if (k == "use_walk") c.classify.ablation.use_walk = s.as_bool();
    else if (k == "seed") c.classify_seed = s.as_u64();
    else if (k == "split_seed") c.split_seed = s.as_u64();
    else s.unknown();
  } else if (s.section == "rules") {
    if (k == "bucket_rules") c.bucket_rules_path = s.value;
    else if (k == "role_rules") c.role_rules_path = s.value;
    else s.unknown();
  } else {
    bad(s.origin, s.line, "unknown section [" + s.section + "]");
  }
}

}  // namespace

PipelineConfig parse_config(std::string_view text, std::string_view origin) {
  PipelineConfig cfg;
  Setter setter{cfg, origin, 0, {}, {}, {}};
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::string section;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        bad(origin, line_no, "malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      bad(origin, line_no, "expected 'key = value'");
    }
    if (section.empty()) {
      bad(origin, line_no, "key outside any section");
    }
    setter.line = line_no;
    setter.section = section;
    setter.key = trim(std::string_view(line).substr(0, eq));
    setter.value = trim(std::string_view(line).substr(eq + 1));
    if (setter.key.empty()) bad(origin, line_no, "empty key");
    apply(setter);
  }
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    fail(ErrorCode::BadConfig,
         std::string(origin) + ": test_fraction must lie in (0, 1)");
  }
  if (cfg.embed.dim == 0 || cfg.walk.dim == 0) {
    fail(ErrorCode::BadConfig,
         std::string(origin) + ": embedding dims must be positive");
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path), path);
}

}  // namespace poincavec::config
