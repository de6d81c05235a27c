#include "poincavec/pipeline.hpp"

#include <filesystem>

#include "poincavec/csv.hpp"
#include "poincavec/errors.hpp"
#include "poincavec/hierfeat.hpp"

namespace poincavec::pipeline {

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

namespace {

std::vector<TransactionRecord> read_normalized(const std::string& path) {
  // normalized files always carry the canonical header
  auto result = txgraph::ingest_transactions(path, txgraph::ColumnSchema{});
  return std::move(result.records);
}

txgraph::TxGraph graph_for(const std::vector<TransactionRecord>& records) {
  return txgraph::build_graph(records);
}

void check_embedding_matches(const embed::EmbeddingMatrix& emb,
                             const txgraph::TxGraph& graph,
                             const std::string& path) {
  if (emb.node_names != graph.addresses) {
    fail(ErrorCode::MisalignedInputs,
         path + ": embedding nodes do not match the transaction graph");
  }
}

struct AssembledFeatures {
  roleclf::FeatureSet set;
};

AssembledFeatures assemble_from_files(const config::PipelineConfig& cfg,
                                      const std::string& embedding_csv,
                                      const std::string& walk_csv,
                                      const std::string& hier_csv) {
  const auto flags = cfg.classify.ablation;
  embed::EmbeddingMatrix ball = embed::read_embedding_csv(embedding_csv);
  embed::EmbeddingMatrix walk;
  std::vector<hierfeat::HierFeatureVector> hier;
  std::vector<std::string> hier_names;
  if (flags.use_walk) {
    if (walk_csv.empty()) {
      fail(ErrorCode::MisalignedInputs,
           "walk features enabled but no walk embedding given");
    }
    walk = embed::read_embedding_csv(walk_csv);
  }
  if (flags.use_hier) {
    if (hier_csv.empty()) {
      fail(ErrorCode::MisalignedInputs,
           "node features enabled but no feature file given");
    }
    hier = hierfeat::read_hier_csv(hier_csv, &hier_names);
  }
  AssembledFeatures out{roleclf::assemble_features(
      ball, flags.use_walk ? &walk : nullptr, flags.use_hier ? &hier : nullptr,
      flags.use_hier ? &hier_names : nullptr, flags)};
  return out;
}

}  // namespace

IngestOutcome run_ingest(const config::PipelineConfig& cfg,
                         const std::string& input_csv,
                         const std::string& out_dir) {
  ensure_dir(out_dir);
  auto result = txgraph::ingest_transactions(input_csv, cfg.schema);
  txgraph::write_transactions_csv(join_path(out_dir, kNormalizedCsv),
                                  result.records);
  txgraph::write_summary_csv(join_path(out_dir, kSummaryCsv),
                             txgraph::summarize(result.records));
  return IngestOutcome{result.records.size(), result.skipped};
}

std::size_t run_bucket(const config::PipelineConfig& cfg,
                       const std::string& normalized_csv,
                       const std::string& out_dir) {
  ensure_dir(out_dir);
  auto records = read_normalized(normalized_csv);
  auto rules = bucketing::load_bucket_rules(cfg.bucket_rules_path);
  CsvWriter w(join_path(out_dir, kBucketedCsv));
  w.row({"chain", "token", "tx_id", "timestamp", "from", "to", "value",
         "function_name", "bucket"});
  for (const auto& rec : records) {
    w.row({rec.chain, rec.token, rec.tx_id, std::to_string(rec.timestamp),
           rec.from, rec.to, format_double(rec.value), rec.function_name,
           std::string(bucketing::assign_bucket(rec.function_name, rules))});
  }
  return records.size();
}

std::size_t run_report(const config::PipelineConfig& cfg,
                       const std::string& normalized_csv,
                       const std::string& out_dir) {
  ensure_dir(out_dir);
  auto records = read_normalized(normalized_csv);
  auto rules = bucketing::load_bucket_rules(cfg.bucket_rules_path);
  auto rows = bucketing::function_chain_report(records, rules);
  CsvWriter w(join_path(out_dir, kReportCsv));
  w.row({"bucket", "chain", "tx_count", "total_value", "first_seen",
         "last_seen"});
  for (const auto& row : rows) {
    w.row({row.bucket, row.chain, std::to_string(row.tx_count),
           format_double(row.total_value), format_date(row.first_seen),
           format_date(row.last_seen)});
  }
  return rows.size();
}

LabelOutcome run_label(const config::PipelineConfig& cfg,
                       const std::string& labels_csv,
                       const std::string& out_dir) {
  ensure_dir(out_dir);
  auto rules = bucketing::load_role_rules(cfg.role_rules_path);
  auto result = txgraph::load_labels(labels_csv, rules);
  txgraph::write_labels_csv(join_path(out_dir, kLabeledCsv), result.labels);
  return LabelOutcome{result.labels.size(), result.duplicates_dropped};
}

void run_embed(const config::PipelineConfig& cfg,
               const std::string& normalized_csv, const std::string& out_dir) {
  ensure_dir(out_dir);
  auto records = read_normalized(normalized_csv);
  auto graph = graph_for(records);
  auto result = embed::train(graph, cfg.embed_config());
  embed::write_embedding_csv(join_path(out_dir, kEmbeddingCsv),
                             result.embedding);
  embed::write_trace_csv(join_path(out_dir, kLossTraceCsv), result.trace);
}

std::size_t run_refine(const config::PipelineConfig& cfg,
                       const std::string& normalized_csv,
                       const std::string& embedding_csv,
                       const std::string& out_dir) {
  ensure_dir(out_dir);
  auto records = read_normalized(normalized_csv);
  auto graph = graph_for(records);
  auto emb = embed::read_embedding_csv(embedding_csv);
  check_embedding_matches(emb, graph, embedding_csv);
  auto trust = lar::node_trust(graph, cfg.refine);
  auto result = lar::refine(emb, graph, trust, cfg.refine);
  embed::write_embedding_csv(join_path(out_dir, kRefinedCsv),
                             result.embedding);
  lar::write_trust_csv(join_path(out_dir, kTrustCsv), graph, trust);
  return result.steps_run;
}

void run_features(const config::PipelineConfig& cfg,
                  const std::string& normalized_csv,
                  const std::string& embedding_csv, const std::string& out_dir,
                  bool with_walks) {
  ensure_dir(out_dir);
  auto records = read_normalized(normalized_csv);
  auto graph = graph_for(records);
  auto emb = embed::read_embedding_csv(embedding_csv);
  check_embedding_matches(emb, graph, embedding_csv);
  auto feats = hierfeat::hier_features(emb, graph, cfg.k_hop);
  hierfeat::write_hier_csv(join_path(out_dir, kHierCsv), graph, feats);
  if (with_walks) {
    auto walk_cfg = cfg.walk_config();
    auto walks = walkfeat::generate_walks(graph, walk_cfg);
    auto walk_emb = walkfeat::train_walk_embeddings(walks, graph, walk_cfg);
    embed::write_embedding_csv(join_path(out_dir, kWalkCsv), walk_emb);
  }
}

TrainOutcome run_classify_train(const config::PipelineConfig& cfg,
                                const std::string& embedding_csv,
                                const std::string& walk_csv,
                                const std::string& hier_csv,
                                const std::string& labeled_csv,
                                const std::string& out_dir) {
  ensure_dir(out_dir);
  auto assembled = assemble_from_files(cfg, embedding_csv, walk_csv, hier_csv);
  auto labels = txgraph::read_labeled_csv(labeled_csv);
  roleclf::attach_labels(assembled.set.rows, labels);

  auto split = roleclf::stratified_split(assembled.set.rows, cfg.test_fraction,
                                         cfg.resolved_split_seed());
  auto clf_cfg = cfg.classify_config();
  clf_cfg.layout = assembled.set.layout;
  auto result =
      roleclf::train_classifier(assembled.set.rows, split.train, clf_cfg);

  roleclf::save_model(join_path(out_dir, kModelFile), result.model);
  roleclf::write_split_csv(join_path(out_dir, kSplitCsv), assembled.set.rows,
                           split);
  {
    CsvWriter w(join_path(out_dir, kTrainTraceCsv));
    w.row({"epoch", "train_loss", "val_macro_f1"});
    for (const auto& row : result.trace) {
      w.row({std::to_string(row.epoch), format_double(row.train_loss),
             format_double(row.val_macro_f1)});
    }
  }
  return TrainOutcome{result.best_epoch, result.trace.size(),
                      split.train.size(), split.test.size()};
}

EvalOutcome run_classify_eval(const config::PipelineConfig& cfg,
                              const std::string& embedding_csv,
                              const std::string& walk_csv,
                              const std::string& hier_csv,
                              const std::string& labeled_csv,
                              const std::string& model_path,
                              const std::string& split_csv,
                              const std::string& out_dir) {
  ensure_dir(out_dir);
  auto assembled = assemble_from_files(cfg, embedding_csv, walk_csv, hier_csv);
  auto labels = txgraph::read_labeled_csv(labeled_csv);
  roleclf::attach_labels(assembled.set.rows, labels);
  auto model = roleclf::load_model(model_path);
  auto split = roleclf::read_split_csv(split_csv, assembled.set.rows);

  auto metrics = roleclf::evaluate(model, assembled.set.rows, split.test);

  // constant-prediction baseline from the training majority class
  roleclf::Metrics baseline;
  {
    Role majority = roleclf::majority_role(assembled.set.rows, split.train);
    std::vector<Role> truth, pred;
    for (std::size_t i : split.test) {
      truth.push_back(*assembled.set.rows[i].label);
      pred.push_back(majority);
    }
    baseline = roleclf::compute_metrics(truth, pred);
  }

  roleclf::write_metrics_csv(join_path(out_dir, kMetricsCsv), metrics,
                             &baseline);
  roleclf::write_confusion_csv(join_path(out_dir, kConfusionCsv), metrics);
  return EvalOutcome{metrics.macro_f1, metrics.accuracy};
}

void run_classify_predict(const config::PipelineConfig& cfg,
                          const std::string& embedding_csv,
                          const std::string& walk_csv,
                          const std::string& hier_csv,
                          const std::string& model_path,
                          const std::string& out_dir) {
  ensure_dir(out_dir);
  auto assembled = assemble_from_files(cfg, embedding_csv, walk_csv, hier_csv);
  auto model = roleclf::load_model(model_path);
  roleclf::write_predictions_csv(join_path(out_dir, kPredictionsCsv),
                                 assembled.set.rows, model);
}

RunAllOutcome run_all(const config::PipelineConfig& cfg,
                      const std::string& input_csv,
                      const std::string& labels_csv,
                      const std::string& out_dir) {
  ensure_dir(out_dir);
  RunAllOutcome outcome;
  outcome.ingest = run_ingest(cfg, input_csv, out_dir);
  const std::string normalized = join_path(out_dir, kNormalizedCsv);
  run_bucket(cfg, normalized, out_dir);
  run_report(cfg, normalized, out_dir);
  run_embed(cfg, normalized, out_dir);
  run_refine(cfg, normalized, join_path(out_dir, kEmbeddingCsv), out_dir);
  const bool with_walks = cfg.classify.ablation.use_walk;
  run_features(cfg, normalized, join_path(out_dir, kRefinedCsv), out_dir,
               with_walks);
  outcome.label = run_label(cfg, labels_csv, out_dir);
  const std::string walk_csv =
      with_walks ? join_path(out_dir, kWalkCsv) : std::string();
  const std::string hier_csv =
      cfg.classify.ablation.use_hier ? join_path(out_dir, kHierCsv)
                                     : std::string();
  outcome.train = run_classify_train(cfg, join_path(out_dir, kRefinedCsv),
                                     walk_csv, hier_csv,
                                     join_path(out_dir, kLabeledCsv), out_dir);
  outcome.eval = run_classify_eval(
      cfg, join_path(out_dir, kRefinedCsv), walk_csv, hier_csv,
      join_path(out_dir, kLabeledCsv), join_path(out_dir, kModelFile),
      join_path(out_dir, kSplitCsv), out_dir);
  run_classify_predict(cfg, join_path(out_dir, kRefinedCsv), walk_csv,
                       hier_csv, join_path(out_dir, kModelFile), out_dir);
  return outcome;
}

}  // namespace poincavec::pipeline
