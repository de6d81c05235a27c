// File-driven stage drivers. Every stage reads its inputs from disk and
// writes its outputs to disk; the chained runner calls exactly these
// functions, so a chained run and a manual stage-by-stage run produce
// byte-identical files.
#pragma once

#include <cstdint>
#include <string>

#include "poincavec/config.hpp"

namespace poincavec::pipeline {

// canonical output names inside an --out directory
inline constexpr const char* kNormalizedCsv = "normalized_transactions.csv";
inline constexpr const char* kSummaryCsv = "summary.csv";
inline constexpr const char* kBucketedCsv = "bucketed.csv";
inline constexpr const char* kReportCsv = "function_chain_report.csv";
inline constexpr const char* kLabeledCsv = "labeled_addresses.csv";
inline constexpr const char* kEmbeddingCsv = "embedding.csv";
inline constexpr const char* kLossTraceCsv = "loss_trace.csv";
inline constexpr const char* kRefinedCsv = "refined_embedding.csv";
inline constexpr const char* kTrustCsv = "trust_diagnostics.csv";
inline constexpr const char* kWalkCsv = "walk_embedding.csv";
inline constexpr const char* kHierCsv = "hier_features.csv";
inline constexpr const char* kModelFile = "model.txt";
inline constexpr const char* kSplitCsv = "split.csv";
inline constexpr const char* kTrainTraceCsv = "train_trace.csv";
inline constexpr const char* kMetricsCsv = "metrics.csv";
inline constexpr const char* kConfusionCsv = "confusion.csv";
inline constexpr const char* kPredictionsCsv = "predictions.csv";

std::string join_path(const std::string& dir, const std::string& name);
void ensure_dir(const std::string& dir);

struct IngestOutcome {
  std::size_t records = 0;
  std::size_t skipped = 0;
};
IngestOutcome run_ingest(const config::PipelineConfig& cfg,
                         const std::string& input_csv,
                         const std::string& out_dir);

std::size_t run_bucket(const config::PipelineConfig& cfg,
                       const std::string& normalized_csv,
                       const std::string& out_dir);
std::size_t run_report(const config::PipelineConfig& cfg,
                       const std::string& normalized_csv,
                       const std::string& out_dir);

struct LabelOutcome {
  std::size_t labels = 0;
  std::size_t duplicates_dropped = 0;
};
LabelOutcome run_label(const config::PipelineConfig& cfg,
                       const std::string& labels_csv,
                       const std::string& out_dir);

void run_embed(const config::PipelineConfig& cfg,
               const std::string& normalized_csv, const std::string& out_dir);

std::size_t run_refine(const config::PipelineConfig& cfg,
                       const std::string& normalized_csv,
                       const std::string& embedding_csv,
                       const std::string& out_dir);

void run_features(const config::PipelineConfig& cfg,
                  const std::string& normalized_csv,
                  const std::string& embedding_csv, const std::string& out_dir,
                  bool with_walks);

struct TrainOutcome {
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};
// walk_csv / hier_csv may be empty when the matching ablation flag is off
TrainOutcome run_classify_train(const config::PipelineConfig& cfg,
                                const std::string& embedding_csv,
                                const std::string& walk_csv,
                                const std::string& hier_csv,
                                const std::string& labeled_csv,
                                const std::string& out_dir);

struct EvalOutcome {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};
EvalOutcome run_classify_eval(const config::PipelineConfig& cfg,
                              const std::string& embedding_csv,
                              const std::string& walk_csv,
                              const std::string& hier_csv,
                              const std::string& labeled_csv,
                              const std::string& model_path,
                              const std::string& split_csv,
                              const std::string& out_dir);

void run_classify_predict(const config::PipelineConfig& cfg,
                          const std::string& embedding_csv,
                          const std::string& walk_csv,
                          const std::string& hier_csv,
                          const std::string& model_path,
                          const std::string& out_dir);

struct RunAllOutcome {
  IngestOutcome ingest;
  LabelOutcome label;
  TrainOutcome train;
  EvalOutcome eval;
};
RunAllOutcome run_all(const config::PipelineConfig& cfg,
                      const std::string& input_csv,
                      const std::string& labels_csv,
                      const std::string& out_dir);

}  // namespace poincavec::pipeline
