#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrepath/training.hpp"

namespace mrepath {

/// "fold,split,cindex" rows per fold, then "mean" and "std" rows. Skipped folds print "skipped".
void write_cindex_csv(std::ostream& os, const CrossvalResult& r);

/// "fold,epoch,loss"; epoch 0 is the loss before training.
void write_loss_csv(std::ostream& os, const std::vector<FoldResult>& folds);

/// One row per subject: fold,id,w_p,w_g,mono_p,mono_g,holo_p,holo_g.
void write_weights_csv(std::ostream& os, const std::vector<Prediction>& preds);

/// One row per subject: fold,id,c,t,bin,risk.
void write_predictions_csv(std::ostream& os, const std::vector<Prediction>& preds);

/// One CSV per subject and stage: attention_<id>_<stage>.csv with the score matrix.
void write_attention_csvs(const std::filesystem::path& dir, const std::vector<Prediction>& preds);

/// Axis table. The k axis is wide (one column per k value, rows per split then
/// mean and std); the other axes have one row per setting.
void write_ablation_csv(std::ostream& os, const AblationResult& r);

/// Kaplan-Meier output for one risk split.
struct KmReport {
  std::string name;  // fold number or "all"
  KmCurve low;
  KmCurve high;
  bool has_low = false;
  bool has_high = false;
  LogRankResult test;
  std::vector<std::string> notes;
};

/// Median split on risk, KM per group and the log-rank test between them.
KmReport km_report(const std::string& name, const std::vector<Prediction>& preds);

/// "time,survival,at_risk,group" rows for both groups.
void write_km_csv(std::ostream& os, const KmReport& km);
void write_km_svg(std::ostream& os, const KmReport& km);

/// KM CSV + SVG per fold and for the pooled held-out predictions ("all"),
/// plus logrank.csv and weights.csv. Returns the reports in write order.
std::vector<KmReport> emit_plots(const std::filesystem::path& dir, const std::vector<Prediction>& preds);

/// JSON record holding config text, per-fold losses and all predictions.
void save_record(const std::filesystem::path& path, const std::string& config, const std::vector<FoldResult>& folds,
                 const std::vector<Prediction>& preds);
std::vector<Prediction> load_record_predictions(const std::filesystem::path& path);

/// JSON model file: config text, feature dim, gene widths, bin edges, parameters.
void save_model(const std::filesystem::path& path, const Model& model, const BinEdges& bins);
std::pair<Model, BinEdges> load_model(const std::filesystem::path& path);

}  // namespace mrepath
