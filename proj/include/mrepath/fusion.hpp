#pragma once

#include <string>
#include <vector>

#include "mrepath/params.hpp"
#include "mrepath/rng.hpp"
#include "mrepath/tape.hpp"

namespace mrepath {

/// Which attention stages run. Ifa is the full pipeline; the others drop one stage.
enum class FusionMode { Ifa, PgGp, SaPg, SaGp };

FusionMode parse_fusion_mode(const std::string& name);
std::string to_string(FusionMode mode);

/// Projection names under a prefix: "<prefix>.<layer>.{q,k,v}" for layers sa, pg, gp.
void init_attention_params(ParamStore& store, const std::string& prefix, Eigen::Index d, Rng& rng);

/// Query/key/value projections of one attention layer.
struct AttentionVars {
  Var q, k, v;
};

AttentionVars attention_vars(Tape& tape, ParamStore& params, const std::string& prefix, const std::string& layer);

/// softmax((q_src Wq)(kv_src Wk)^T / sqrt(d)) (kv_src Wv). Writes the score
/// matrix to `scores` when non-null.
Var attention(const Var& q_src, const Var& kv_src, const AttentionVars& w, Matrix* scores = nullptr);

Matrix attention(const Matrix& q_src, const Matrix& kv_src, const Matrix& wq, const Matrix& wk, const Matrix& wv);

struct FusedVars {
  Var p_f;
  Var g_f;
};

/// Attention score matrices captured during fuse(), empty for skipped stages.
struct AttentionDump {
  Matrix self_genomic;    // M x M
  Matrix pathology_to_genomic;  // M x N, genomic queries over patches
  Matrix genomic_to_pathology;  // N x M, patch queries over genomic rows
};

/// Genomic branch first (self-attention, pathology-guided co-attention,
/// residual), then the pathology branch against the fused genomic rows.
FusedVars fuse(const Var& p_w, const Var& g_w, ParamStore& params, const std::string& prefix,
               FusionMode mode = FusionMode::Ifa, AttentionDump* dump = nullptr);

struct FusedFeatures {
  Matrix p_f;
  Matrix g_f;
};

FusedFeatures fuse(const Matrix& p_w, const Matrix& g_w, ParamStore& params, const std::string& prefix,
                   FusionMode mode = FusionMode::Ifa);

/// Hazard head parameters "<prefix>.W" (2d x bins) and "<prefix>.b" (1 x bins).
void init_hazard_params(ParamStore& store, const std::string& prefix, Eigen::Index d, int bins,
                        double weight_std, Rng& rng);

/// Per-bin hazards (1 x bins) from the row means of P_f and G_f, clamped to [eps, 1 - eps].
Var hazard_head(const FusedVars& f, ParamStore& params, const std::string& prefix);

/// S(t_b) = prod_{tau <= b} (1 - h(tau)) for each row of hazards.
Matrix survival_curve(const Matrix& hazards);

}  // namespace mrepath
