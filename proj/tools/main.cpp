// poincavec command line: role inference over tokenized-asset transfer
// graphs, one subcommand per pipeline stage plus a chained runner.
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "poincavec/config.hpp"
#include "poincavec/csv.hpp"
#include "poincavec/embed.hpp"
#include "poincavec/errors.hpp"
#include "poincavec/pipeline.hpp"
#include "poincavec/synth.hpp"
#include "poincavec/txgraph.hpp"

namespace pv = poincavec;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string bucket_rules;
  std::string role_rules;
  double test_fraction = 0.0;
  bool test_fraction_set = false;
  std::size_t k_hop = 0;
  bool k_hop_set = false;
};

pv::config::PipelineConfig make_config(const GlobalOpts& g) {
  pv::config::PipelineConfig cfg;
  if (!g.config_path.empty()) cfg = pv::config::load_config(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  if (!g.bucket_rules.empty()) cfg.bucket_rules_path = g.bucket_rules;
  if (!g.role_rules.empty()) cfg.role_rules_path = g.role_rules;
  if (g.test_fraction_set) cfg.test_fraction = g.test_fraction;
  if (g.k_hop_set) cfg.k_hop = g.k_hop;
  return cfg;
}

void add_global_opts(CLI::App* cmd, GlobalOpts& g) {
  cmd->add_option("--config", g.config_path, "pipeline config file");
  cmd->add_option("--seed", g.seed, "root seed override")
      ->each([&g](const std::string&) { g.seed_set = true; });
  cmd->add_option("--bucket-rules", g.bucket_rules, "bucket rule file");
  cmd->add_option("--role-rules", g.role_rules, "role rule file");
  cmd->add_option("--test-fraction", g.test_fraction,
                  "held-out fraction for classify train")
      ->each([&g](const std::string&) { g.test_fraction_set = true; });
  cmd->add_option("--k-hop", g.k_hop, "neighborhood depth for node features")
      ->each([&g](const std::string&) { g.k_hop_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"economic role inference over token transfer graphs"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::string input, labels, out_dir = "out";
  std::string transactions, embedding_csv, walk_csv, hier_csv;
  std::string model_path, split_csv;
  bool with_walks = true;

  std::size_t branching = 3, depth = 4, dim = 8;
  bool lemma_train = false;

  int rc = 0;
  auto guard = [&rc](auto&& fn) {
    return [&rc, fn]() {
      try {
        fn();
      } catch (const pv::Error& e) {
        std::fprintf(stderr, "error[%s]: %s\n", pv::to_string(e.code()),
                     e.what());
        switch (e.kind()) {
          case pv::ErrorKind::Usage: rc = 2; break;
          case pv::ErrorKind::Data: rc = 3; break;
          case pv::ErrorKind::Numeric: rc = 4; break;
        }
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        rc = 1;
      }
    };
  };

  {
    auto* cmd = app.add_subcommand("ingest", "normalize a transaction export");
    cmd->add_option("--input", input, "raw transaction CSV")->required();
    cmd->add_option("--out", out_dir, "output directory");
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto cfg = make_config(g);
      auto outcome = pv::pipeline::run_ingest(cfg, input, out_dir);
      std::printf("ingested %zu records (%zu skipped)\n", outcome.records,
                  outcome.skipped);
    }));
  }
  {
    auto* cmd = app.add_subcommand("bucket", "assign function buckets");
    cmd->add_option("--transactions", transactions, "normalized CSV")
        ->required();
    cmd->add_option("--out", out_dir, "output directory");
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto cfg = make_config(g);
      auto n = pv::pipeline::run_bucket(cfg, transactions, out_dir);
      std::printf("bucketed %zu records\n", n);
    }));
  }
  {
    auto* cmd = app.add_subcommand("report", "function/chain activity report");
    cmd->add_option("--transactions", transactions, "normalized CSV")
        ->required();
    cmd->add_option("--out", out_dir, "output directory");
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto cfg = make_config(g);
      auto n = pv::pipeline::run_report(cfg, transactions, out_dir);
      std::printf("report rows: %zu\n", n);
    }));
  }
  {
    auto* cmd = app.add_subcommand("label", "derive roles from name tags");
    cmd->add_option("--labels", labels, "address,name CSV")->required();
    cmd->add_option("--out", out_dir, "output directory");
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto cfg = make_config(g);
      auto outcome = pv::pipeline::run_label(cfg, labels, out_dir);
      if (outcome.duplicates_dropped > 0) {
        std::fprintf(stderr, "warning: dropped %zu duplicate addresses\n",
                     outcome.duplicates_dropped);
      }
      std::printf("labeled %zu addresses\n", outcome.labels);
    }));
  }
  {
    auto* cmd = app.add_subcommand("embed", "train hyperbolic embeddings");
    cmd->add_option("--transactions", transactions, "normalized CSV")
        ->required();
    cmd->add_option("--out", out_dir, "output directory");
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto cfg = make_config(g);
      pv::pipeline::run_embed(cfg, transactions, out_dir);
      std::printf("embedding written to %s\n",
                  pv::pipeline::join_path(out_dir,
                                          pv::pipeline::kEmbeddingCsv)
                      .c_str());
    }));
  }
  {
    auto* cmd =
        app.add_subcommand("refine", "trust-weighted embedding refinement");
    cmd->add_option("--transactions", transactions, "normalized CSV")
        ->required();
    cmd->add_option("--embedding", embedding_csv, "embedding CSV")->required();
    cmd->add_option("--out", out_dir, "output directory");
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto cfg = make_config(g);
      auto steps =
          pv::pipeline::run_refine(cfg, transactions, embedding_csv, out_dir);
      std::printf("refinement ran %zu sweeps\n", steps);
    }));
  }
  {
    auto* cmd = app.add_subcommand("features", "node features and walks");
    cmd->add_option("--transactions", transactions, "normalized CSV")
        ->required();
    cmd->add_option("--embedding", embedding_csv, "embedding CSV")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_flag("--walks,!--no-walks", with_walks,
                  "also train walk embeddings");
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto cfg = make_config(g);
      pv::pipeline::run_features(cfg, transactions, embedding_csv, out_dir,
                                 with_walks);
      std::printf("features written to %s\n", out_dir.c_str());
    }));
  }
  {
    auto* classify = app.add_subcommand("classify", "role classifier");
    classify->require_subcommand(1);
    auto* train = classify->add_subcommand("train", "fit the classifier");
    train->add_option("--embedding", embedding_csv, "embedding CSV")
        ->required();
    train->add_option("--walk", walk_csv, "walk embedding CSV");
    train->add_option("--hier", hier_csv, "node feature CSV");
    train->add_option("--labels", labels, "labeled_addresses CSV")->required();
    train->add_option("--out", out_dir, "output directory");
    add_global_opts(train, g);
    train->callback(guard([&] {
      auto cfg = make_config(g);
      if (walk_csv.empty()) cfg.classify.ablation.use_walk = false;
      if (hier_csv.empty()) cfg.classify.ablation.use_hier = false;
      auto outcome = pv::pipeline::run_classify_train(
          cfg, embedding_csv, walk_csv, hier_csv, labels, out_dir);
      std::printf("trained %zu epochs (best %zu); %zu train / %zu test rows\n",
                  outcome.epochs_run, outcome.best_epoch, outcome.train_rows,
                  outcome.test_rows);
    }));
    auto* eval = classify->add_subcommand("eval", "evaluate on the held split");
    eval->add_option("--embedding", embedding_csv, "embedding CSV")->required();
    eval->add_option("--walk", walk_csv, "walk embedding CSV");
    eval->add_option("--hier", hier_csv, "node feature CSV");
    eval->add_option("--labels", labels, "labeled_addresses CSV")->required();
    eval->add_option("--model", model_path, "model file")->required();
    eval->add_option("--split", split_csv, "split CSV")->required();
    eval->add_option("--out", out_dir, "output directory");
    add_global_opts(eval, g);
    eval->callback(guard([&] {
      auto cfg = make_config(g);
      if (walk_csv.empty()) cfg.classify.ablation.use_walk = false;
      if (hier_csv.empty()) cfg.classify.ablation.use_hier = false;
      auto outcome = pv::pipeline::run_classify_eval(
          cfg, embedding_csv, walk_csv, hier_csv, labels, model_path,
          split_csv, out_dir);
      std::printf("macro_f1=%s accuracy=%s\n",
                  pv::format_double(outcome.macro_f1).c_str(),
                  pv::format_double(outcome.accuracy).c_str());
    }));
    auto* predict = classify->add_subcommand("predict", "score every node");
    predict->add_option("--embedding", embedding_csv, "embedding CSV")
        ->required();
    predict->add_option("--walk", walk_csv, "walk embedding CSV");
    predict->add_option("--hier", hier_csv, "node feature CSV");
    predict->add_option("--model", model_path, "model file")->required();
    predict->add_option("--out", out_dir, "output directory");
    add_global_opts(predict, g);
    predict->callback(guard([&] {
      auto cfg = make_config(g);
      if (walk_csv.empty()) cfg.classify.ablation.use_walk = false;
      if (hier_csv.empty()) cfg.classify.ablation.use_hier = false;
      pv::pipeline::run_classify_predict(cfg, embedding_csv, walk_csv,
                                         hier_csv, model_path, out_dir);
      std::printf("predictions written to %s\n",
                  pv::pipeline::join_path(out_dir,
                                          pv::pipeline::kPredictionsCsv)
                      .c_str());
    }));
  }
  {
    auto* synth = app.add_subcommand("synth", "synthetic fixtures");
    synth->require_subcommand(1);
    auto* tree = synth->add_subcommand("tree", "analytic tree layout");
    tree->add_option("--branching", branching, "children per node");
    tree->add_option("--depth", depth, "tree depth");
    tree->add_option("--dim", dim, "embedding dimension");
    tree->add_option("--out", out_dir, "output directory");
    add_global_opts(tree, g);
    tree->callback(guard([&] {
      auto cfg = make_config(g);
      pv::synth::TreeSpec spec;
      spec.branching = branching;
      spec.depth = depth;
      auto t = pv::synth::ideal_tree_embedding(spec, dim, cfg.seed);
      pv::pipeline::ensure_dir(out_dir);
      pv::txgraph::write_transactions_csv(
          pv::pipeline::join_path(out_dir, "tree_transactions.csv"),
          pv::synth::tree_records(t));
      pv::embed::write_embedding_csv(
          pv::pipeline::join_path(out_dir, "tree_embedding.csv"), t.embedding);
      pv::CsvWriter w(pv::pipeline::join_path(out_dir, "tree_depths.csv"));
      w.row({"node", "depth"});
      for (std::size_t i = 0; i < t.depths.size(); ++i) {
        w.row({t.embedding.node_names[i], std::to_string(t.depths[i])});
      }
      std::printf("tree with %zu nodes written to %s\n", t.depths.size(),
                  out_dir.c_str());
    }));
    auto* roles = synth->add_subcommand("roles", "planted-role transfer graph");
    roles->add_option("--out", out_dir, "output directory");
    add_global_opts(roles, g);
    roles->callback(guard([&] {
      auto cfg = make_config(g);
      pv::synth::PlantedRoleSpec spec;
      spec.seed = cfg.seed;
      auto planted = pv::synth::generate_planted_graph(spec);
      pv::pipeline::ensure_dir(out_dir);
      pv::txgraph::write_transactions_csv(
          pv::pipeline::join_path(out_dir, "planted_transactions.csv"),
          planted.records);
      {
        pv::CsvWriter w(
            pv::pipeline::join_path(out_dir, "planted_labels.csv"));
        w.row({"address", "name"});
        for (const auto& label : planted.labels) {
          w.row({label.address, label.name_tag});
        }
      }
      pv::txgraph::write_labels_csv(
          pv::pipeline::join_path(out_dir, "planted_truth.csv"),
          planted.labels);
      std::printf("planted graph: %zu transfers, %zu labeled addresses\n",
                  planted.records.size(), planted.labels.size());
    }));
    auto* lemma = synth->add_subcommand(
        "check-lemma", "radius/depth rank agreement on trees");
    lemma->add_option("--branching", branching, "children per node");
    lemma->add_option("--depth", depth, "tree depth");
    lemma->add_option("--dim", dim, "embedding dimension");
    lemma->add_flag("--train", lemma_train,
                    "also train embeddings on the tree graph");
    add_global_opts(lemma, g);
    lemma->callback(guard([&] {
      auto cfg = make_config(g);
      pv::synth::TreeSpec spec;
      spec.branching = branching;
      spec.depth = depth;
      auto t = pv::synth::ideal_tree_embedding(spec, dim, cfg.seed);
      auto ideal = pv::synth::check_radius_monotonicity(t.embedding, t.depths);
      std::printf("ideal_rho=%s\n", pv::format_double(ideal.rho).c_str());
      if (lemma_train) {
        auto graph = pv::txgraph::build_graph(pv::synth::tree_records(t));
        auto train_cfg = cfg.embed_config();
        train_cfg.dim = dim;
        auto trained = pv::embed::train(graph, train_cfg);
        auto rho = pv::synth::check_radius_monotonicity(trained.embedding,
                                                        t.depths);
        std::printf("trained_rho=%s\n", pv::format_double(rho.rho).c_str());
      }
    }));
  }
  {
    auto* cmd = app.add_subcommand("profile", "compare a corpus to the "
                                              "reference dataset shape");
    cmd->add_option("--transactions", transactions, "normalized CSV")
        ->required();
    cmd->add_option("--labeled", labels, "labeled_addresses CSV")->required();
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto ingested =
          pv::txgraph::ingest_transactions(transactions,
                                           pv::txgraph::ColumnSchema{});
      auto labeled = pv::txgraph::read_labeled_csv(labels);
      auto lines = pv::txgraph::dataset_profile(ingested.records, labeled);
      bool all_match = true;
      std::printf("%-14s %10s %10s %s\n", "metric", "expected", "observed",
                  "match");
      for (const auto& line : lines) {
        bool ok = line.expected == line.observed;
        all_match = all_match && ok;
        std::printf("%-14s %10zu %10zu %s\n", line.name.c_str(), line.expected,
                    line.observed, ok ? "yes" : "NO");
      }
      std::printf("profile %s\n", all_match ? "matches" : "differs");
    }));
  }
  {
    auto* cmd = app.add_subcommand("run-all", "chain every stage");
    cmd->add_option("--input", input, "raw transaction CSV")->required();
    cmd->add_option("--labels", labels, "address,name CSV")->required();
    cmd->add_option("--out", out_dir, "output directory");
    add_global_opts(cmd, g);
    cmd->callback(guard([&] {
      auto cfg = make_config(g);
      auto outcome = pv::pipeline::run_all(cfg, input, labels, out_dir);
      std::printf("ingested %zu records (%zu skipped); %zu labels\n",
                  outcome.ingest.records, outcome.ingest.skipped,
                  outcome.label.labels);
      std::printf("macro_f1=%s accuracy=%s\n",
                  pv::format_double(outcome.eval.macro_f1).c_str(),
                  pv::format_double(outcome.eval.accuracy).c_str());
    }));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version requests exit 0, genuine usage errors exit 2
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return rc;
}
