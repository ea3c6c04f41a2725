#pragma once

#include <string>
#include <vector>

#include "mrepath/cohort.hpp"
#include "mrepath/config.hpp"
#include "mrepath/model.hpp"

namespace mrepath {

/// Per-subject evaluation output.
struct Prediction {
  int fold = -1;
  std::string id;
  SurvLabel label;
  double risk = 0.0;
  Matrix hazards;  // 1 x bins
  Confidence confidence;
  AttentionDump attention;  // filled only when attention capture was requested
};

/// Append-only log of a training run.
struct RunRecord {
  std::string config;                // to_text(config) snapshot
  std::vector<double> epoch_loss;    // mean NLL over training subjects, per epoch; index 0 is before any update
  std::vector<Prediction> training;  // final-epoch forward on the training subjects
  double wall_seconds = 0.0;         // not written to deterministic outputs
};

struct TrainResult {
  Model model;
  BinEdges bins;
  RunRecord record;
};

/// Trains on cohort subjects `train_idx` (all subjects when empty). Bin edges
/// come from those subjects only. Per-subject Adam steps in a seeded shuffle order.
/// Throws NumericError with epoch/subject context on a non-finite loss.
TrainResult train(const Cohort& cohort, const RunConfig& cfg, std::vector<int> train_idx = {});

/// Evaluates a trained model on the listed subjects (bins assigned with `bins`).
std::vector<Prediction> evaluate(Model& model, const Cohort& cohort, const BinEdges& bins,
                                 const std::vector<int>& idx, bool capture_attention = false);

/// Stratified-by-censorship fold assignment: fold[i] in [0, folds).
std::vector<int> assign_folds(const std::vector<SurvLabel>& labels, int folds, std::uint64_t seed);

struct FoldResult {
  int fold = 0;
  int n_train = 0;
  int n_test = 0;
  bool skipped = false;  // no comparable pair in the held-out fold
  double cindex = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_loss;
};

struct CrossvalResult {
  std::string config;
  std::vector<int> fold_of;
  std::vector<FoldResult> folds;
  std::vector<Prediction> predictions;  // held-out, in fold then subject order
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over non-skipped folds
  std::vector<std::string> warnings;
};

CrossvalResult crossval(const Cohort& cohort, const RunConfig& cfg, bool capture_attention = false);

/// One ablation axis: k, graph_mode, weighting or fusion.
struct AblationSetting {
  std::string label;
  RunConfig config;
};

std::vector<AblationSetting> ablation_settings(const std::string& axis, const RunConfig& base);

struct AblationResult {
  std::string axis;
  std::vector<AblationSetting> settings;
  std::vector<CrossvalResult> runs;
};

/// Runs crossval per setting. All settings share the base seed, so fold
/// assignments are identical across the axis.
AblationResult ablate(const Cohort& cohort, const RunConfig& base, const std::string& axis);

}  // namespace mrepath
