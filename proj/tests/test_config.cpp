#include <string>

#include "doctest.h"
#include "poincavec/config.hpp"
#include "poincavec/errors.hpp"
#include "poincavec/rng.hpp"

using namespace poincavec;

namespace {

ErrorCode code_of(const char* text) {
  try {
    config::parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a config error");
  return ErrorCode::BadConfig;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty text yields documented defaults") {
  auto cfg = config::parse_config("");
  CHECK(cfg.seed == 42);
  CHECK(cfg.k_hop == 1);
  CHECK(cfg.test_fraction == 0.2);
  CHECK(cfg.embed.dim == 64);
  CHECK(cfg.embed.epochs == 500);
  CHECK(cfg.embed.radial_weight == 0.1);
  CHECK(cfg.embed.margin == 1.0);
  CHECK(cfg.refine.steps == 3);
  CHECK(cfg.walk.walk_length == 5);
  CHECK(cfg.walk.walks_per_node == 10);
  CHECK(cfg.classify.hidden_width == 128);
  CHECK(cfg.classify.weight_decay == 0.2);
  CHECK(cfg.classify.patience == 10);
  CHECK(cfg.classify.max_epochs == 2000);
  CHECK(cfg.classify.ablation.use_hier);
  CHECK(cfg.classify.ablation.use_walk);
  CHECK(cfg.bucket_rules_path == "data/rules/usdy.rules");
}

TEST_CASE("every section parses and lands in the right struct") {
  auto cfg = config::parse_config(
      "[pipeline]\n"
      "seed = 7\n"
      "k_hop = 2\n"
      "test_fraction = 0.25\n"
      "# comment line\n"
      "[ingest]\n"
      "from = sender\n"
      "[embed]\n"
      "dim = 16\n"
      "epochs = 50\n"
      "seed = 99\n"
      "[refine]\n"
      "steps = 5\n"
      "window_start = 100\n"
      "window_delta = 50\n"
      "[walk]\n"
      "dim = 8\n"
      "[classify]\n"
      "batch_size = 4\n"
      "use_walk = false\n"
      "[rules]\n"
      "bucket_rules = data/rules/buidl.rules\n");
  CHECK(cfg.seed == 7);
  CHECK(cfg.k_hop == 2);
  CHECK(cfg.test_fraction == 0.25);
  CHECK(cfg.schema.from == "sender");
  CHECK(cfg.embed.dim == 16);
  CHECK(cfg.embed.epochs == 50);
  CHECK(cfg.embed_seed == std::uint64_t{99});
  CHECK(cfg.refine.steps == 5);
  CHECK(cfg.refine.window_start == std::int64_t{100});
  CHECK(cfg.refine.window_delta == std::int64_t{50});
  CHECK(cfg.walk.dim == 8);
  CHECK(cfg.classify.batch_size == 4);
  CHECK(!cfg.classify.ablation.use_walk);
  CHECK(cfg.bucket_rules_path == "data/rules/buidl.rules");
}

TEST_CASE("stage seeds derive from the root unless pinned") {
  auto cfg = config::parse_config("[pipeline]\nseed = 5\n");
  CHECK(cfg.embed_config().seed == derive_seed(5, "embed"));
  CHECK(cfg.walk_config().seed == derive_seed(5, "walk"));
  CHECK(cfg.classify_config().seed == derive_seed(5, "classify"));
  CHECK(cfg.resolved_split_seed() == derive_seed(5, "split"));

  auto pinned = config::parse_config("[embed]\nseed = 123\n");
  CHECK(pinned.embed_config().seed == 123);
}

TEST_CASE("typos and malformed lines are rejected") {
  CHECK(code_of("[pipeline]\nsead = 1\n") == ErrorCode::BadConfig);
  CHECK(code_of("[nosuchsection]\nx = 1\n") == ErrorCode::BadConfig);
  CHECK(code_of("[pipeline]\nseed\n") == ErrorCode::BadConfig);
  CHECK(code_of("seed = 1\n") == ErrorCode::BadConfig);  // key before section
  CHECK(code_of("[pipeline]\nseed = notanumber\n") == ErrorCode::BadConfig);
  CHECK(code_of("[pipeline]\ntest_fraction = 1.5\n") == ErrorCode::BadConfig);
  CHECK(code_of("[embed]\ndim = 0\n") == ErrorCode::BadConfig);
}

}  // TEST_SUITE
