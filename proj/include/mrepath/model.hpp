#pragma once

#include <string>
#include <vector>

#include "mrepath/cohort.hpp"
#include "mrepath/config.hpp"
#include "mrepath/fusion.hpp"
#include "mrepath/genomics.hpp"
#include "mrepath/rebalance.hpp"
#include "mrepath/sheaf.hpp"

namespace mrepath {

/// Per-subject structures that depend only on the data and the graph settings.
struct PreparedSubject {
  const Subject* subject = nullptr;
  bool use_graph = false;
  Hypergraph graph;
  Matrix restriction_inputs;  // sheaf modes with learned maps
  Matrix fixed_operator;      // hgnn mode, or sheaf modes with identity maps
};

/// Builds the hypergraph for one subject. k = 0 or graph_mode none bypasses graph learning.
PreparedSubject prepare_subject(const Subject& s, const RunConfig& cfg);

struct ForwardResult {
  Var hazards;  // 1 x bins
  Confidence confidence;
  AttentionDump attention;
};

/// Full pipeline: hypergraph layers, genomics embedding, rebalancing, fusion, hazard head.
class Model {
 public:
  Model() = default;
  Model(const RunConfig& cfg, Eigen::Index dim, std::vector<Eigen::Index> gene_widths);

  /// Fresh parameters drawn from rng.
  static Model init(const RunConfig& cfg, Eigen::Index dim, std::vector<Eigen::Index> gene_widths, Rng& rng);

  ForwardResult forward(Tape& tape, const PreparedSubject& s, bool capture_attention = false);

  /// Hazards for one subject without recording gradients.
  Matrix predict(const PreparedSubject& s);

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const RunConfig& config() const { return cfg_; }
  Eigen::Index dim() const { return dim_; }
  const GenomicsSpec& genomics_spec() const { return geno_; }

 private:
  RunConfig cfg_;
  Eigen::Index dim_ = 0;
  GenomicsSpec geno_;
  ParamStore params_;
};

/// Adam with coupled L2 weight decay (g += wd * theta before the moment updates).
class Adam {
 public:
  Adam(const ParamStore& params, double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(ParamStore& params);

 private:
  double lr_, wd_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace mrepath
