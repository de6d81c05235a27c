// Role classification head: feature assembly, stratified splitting, a small
// batch-normalized MLP trained with AdamW, and confusion-matrix metrics.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poincavec/embed.hpp"
#include "poincavec/hierfeat.hpp"
#include "poincavec/records.hpp"

namespace poincavec::roleclf {

struct AblationFlags {
  bool use_hier = true;
  bool use_walk = true;
};

struct FeatureLayout {
  std::size_t ball_dim = 0;
  std::size_t walk_dim = 0;  // 0 when ablated
  std::size_t hier_dim = 0;  // 0 when ablated
  std::size_t total() const { return ball_dim + walk_dim + hier_dim; }
};

struct FeatureRow {
  std::string node;
  std::vector<double> x;
  std::optional<Role> label;
};

struct FeatureSet {
  std::vector<FeatureRow> rows;  // ball-embedding node order
  FeatureLayout layout;
};

// Concatenates [ball | walk | hier] per node, honoring the ablation flags.
// walk_emb / hier may be null only when the corresponding flag is off.
// Node sets must match exactly -> MisalignedInputs.
FeatureSet assemble_features(
    const embed::EmbeddingMatrix& ball_emb,
    const embed::EmbeddingMatrix* walk_emb,
    const std::vector<hierfeat::HierFeatureVector>* hier,
    const std::vector<std::string>* hier_names, AblationFlags flags);

// labels for addresses absent from rows are ignored; returns how many
// labels attached
std::size_t attach_labels(std::vector<FeatureRow>& rows,
                          std::span<const LabeledAddress> labels);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified over labeled rows only. Per class, round(n * fraction) rows go
// to test, clamped to n-1 so every class keeps a training presence. Any
// labeled class with fewer than 2 members -> ClassTooSmall.
SplitIndices stratified_split(const std::vector<FeatureRow>& rows,
                              double test_fraction, std::uint64_t seed);

void write_split_csv(const std::string& path,
                     const std::vector<FeatureRow>& rows,
                     const SplitIndices& split);
SplitIndices read_split_csv(const std::string& path,
                            const std::vector<FeatureRow>& rows);

struct Scaler {
  std::vector<double> mean;
  std::vector<double> scale;

  // zero-variance columns pass through untouched (mean 0, scale 1)
  void fit(const std::vector<FeatureRow>& rows,
           std::span<const std::size_t> indices);
  void apply(std::span<const double> x, std::span<double> out) const;
};

struct ClassifierConfig {
  std::size_t hidden_width = 128;
  double dropout = 0.3;
  double learning_rate = 1e-3;
  double weight_decay = 0.2;  // decoupled, weight matrices only
  std::size_t max_epochs = 2000;
  std::size_t patience = 10;    // epochs without val improvement
  double val_fraction = 0.1;    // carved out of the training rows
  std::size_t batch_size = 8;   // 0 runs full-batch epochs
  bool class_weighting = false;
  std::uint64_t seed = 0;
  // recorded into the model file for predict-time validation
  FeatureLayout layout{};
  AblationFlags ablation{};
};

struct MlpModel {
  FeatureLayout layout;
  AblationFlags ablation;
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  double dropout = 0.0;
  Scaler scaler;
  // affine -> batchnorm -> relu -> dropout -> affine
  std::vector<double> w1, b1;          // hidden x input, hidden
  std::vector<double> bn_gamma, bn_beta;
  std::vector<double> bn_mean, bn_var; // running stats, frozen at eval
  std::vector<double> w2, b2;          // classes x hidden, classes

  std::array<double, kRoleCount> predict_probs(std::span<const double> x) const;
  Role predict(std::span<const double> x) const;
};

struct TrainTraceRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_macro_f1 = 0.0;
};

struct ClassifierTrainResult {
  MlpModel model;
  std::vector<TrainTraceRow> trace;
  std::size_t best_epoch = 0;
};

// train_indices must reference labeled rows; fewer than two distinct
// classes -> SingleClassTrain. Keeps the parameters from the epoch with the
// best validation macro-F1.
ClassifierTrainResult train_classifier(const std::vector<FeatureRow>& rows,
                                       std::span<const std::size_t> train_indices,
                                       const ClassifierConfig& cfg);

struct Metrics {
  std::array<std::array<std::size_t, kRoleCount>, kRoleCount> confusion{};
  std::array<double, kRoleCount> precision{};
  std::array<double, kRoleCount> recall{};
  std::array<double, kRoleCount> f1{};
  std::array<std::size_t, kRoleCount> support{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t total = 0;
};

// Every derived number comes from the integer confusion matrix alone, so a
// recomputation from the stored matrix reproduces identical bits. Macro
// averages run over classes present in the truth.
Metrics compute_metrics(std::span<const Role> truth,
                        std::span<const Role> predicted);
Metrics metrics_from_confusion(
    const std::array<std::array<std::size_t, kRoleCount>, kRoleCount>& cm);

// truth labels required on every test row; empty test -> EmptyTest
Metrics evaluate(const MlpModel& model, const std::vector<FeatureRow>& rows,
                 std::span<const std::size_t> test_indices);

double softmax_cross_entropy(std::span<const double> logits, std::size_t truth);

void save_model(const std::string& path, const MlpModel& model);
MlpModel load_model(const std::string& path);

void write_predictions_csv(const std::string& path,
                           const std::vector<FeatureRow>& rows,
                           const MlpModel& model);
void write_metrics_csv(const std::string& path, const Metrics& metrics,
                       const Metrics* majority_baseline);
void write_confusion_csv(const std::string& path, const Metrics& metrics);

// most frequent role among the given labeled rows; ties pick the lower
// role index
Role majority_role(const std::vector<FeatureRow>& rows,
                   std::span<const std::size_t> indices);

}  // namespace poincavec::roleclf
