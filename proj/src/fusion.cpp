#include "mrepath/fusion.hpp"

#include <cmath>

#include "mrepath/ops.hpp"
#include "mrepath/survival.hpp"

namespace mrepath {

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "IFA" || name == "ifa") return FusionMode::Ifa;
  if (name == "PG+GP" || name == "pg+gp") return FusionMode::PgGp;
  if (name == "SA+PG" || name == "sa+pg") return FusionMode::SaPg;
  if (name == "SA+GP" || name == "sa+gp") return FusionMode::SaGp;
  throw ConfigError("unknown fusion mode '" + name + "' (expected IFA, PG+GP, SA+PG, SA+GP)");
}

std::string to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::Ifa: return "IFA";
    case FusionMode::PgGp: return "PG+GP";
    case FusionMode::SaPg: return "SA+PG";
    case FusionMode::SaGp: return "SA+GP";
  }
  return "IFA";
}

void init_attention_params(ParamStore& store, const std::string& prefix, Eigen::Index d, Rng& rng) {
  const double std_dev = 1.0 / std::sqrt(double(d));
  for (const char* layer : {"sa", "pg", "gp"})
    for (const char* proj : {"q", "k", "v"})
      store.add(prefix + "." + layer + "." + proj, rng.normal_matrix(d, d, std_dev));
}

AttentionVars attention_vars(Tape& tape, ParamStore& params, const std::string& prefix, const std::string& layer) {
  const std::string base = prefix + "." + layer + ".";
  return {tape.param(params, base + "q"), tape.param(params, base + "k"), tape.param(params, base + "v")};
}

Var attention(const Var& q_src, const Var& kv_src, const AttentionVars& w, Matrix* scores) {
  require_shape(q_src.cols() == kv_src.cols(), "attention: query width " + std::to_string(q_src.cols()) +
                                                   " vs key/value width " + std::to_string(kv_src.cols()));
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(q_src.cols()));
  const Var q = matmul(q_src, w.q);
  const Var k = matmul(kv_src, w.k);
  const Var v = matmul(kv_src, w.v);
  const Var a = softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt_d));
  if (scores != nullptr) *scores = a.value();
  return matmul(a, v);
}

Matrix attention(const Matrix& q_src, const Matrix& kv_src, const Matrix& wq, const Matrix& wk, const Matrix& wv) {
  Tape t;
  return attention(t.constant(q_src), t.constant(kv_src), {t.constant(wq), t.constant(wk), t.constant(wv)}).value();
}

FusedVars fuse(const Var& p_w, const Var& g_w, ParamStore& params, const std::string& prefix, FusionMode mode,
               AttentionDump* dump) {
  require_shape(p_w.cols() == g_w.cols(), "fuse: pathology and genomic widths differ");
  Tape& t = *p_w.tape();
  Matrix* sa_scores = dump ? &dump->self_genomic : nullptr;
  Matrix* pg_scores = dump ? &dump->pathology_to_genomic : nullptr;
  Matrix* gp_scores = dump ? &dump->genomic_to_pathology : nullptr;

  const Var g_s = mode == FusionMode::PgGp ? g_w : attention(g_w, g_w, attention_vars(t, params, prefix, "sa"), sa_scores);
  const Var g_f = mode == FusionMode::SaGp
                      ? g_s
                      : add(g_s, attention(g_s, p_w, attention_vars(t, params, prefix, "pg"), pg_scores));
  const Var p_f = mode == FusionMode::SaPg
                      ? p_w
                      : add(p_w, attention(p_w, g_f, attention_vars(t, params, prefix, "gp"), gp_scores));
  return {p_f, g_f};
}

FusedFeatures fuse(const Matrix& p_w, const Matrix& g_w, ParamStore& params, const std::string& prefix,
                   FusionMode mode) {
  Tape t;
  const FusedVars f = fuse(t.constant(p_w), t.constant(g_w), params, prefix, mode);
  return {f.p_f.value(), f.g_f.value()};
}

void init_hazard_params(ParamStore& store, const std::string& prefix, Eigen::Index d, int bins,
                        double weight_std, Rng& rng) {
  if (bins < 2) throw ConfigError("hazard head needs at least 2 bins");
  store.add(prefix + ".W", rng.normal_matrix(2 * d, bins, weight_std));
  store.add(prefix + ".b", Matrix::Zero(1, bins));
}

Var hazard_head(const FusedVars& f, ParamStore& params, const std::string& prefix) {
  Tape& t = *f.p_f.tape();
  const Var pooled = concat_cols({row_mean(f.p_f), row_mean(f.g_f)});
  const Var h = sigmoid(add_row(matmul(pooled, t.param(params, prefix + ".W")), t.param(params, prefix + ".b")));
  return clamp(h, kHazardEps, 1.0 - kHazardEps);
}

Matrix survival_curve(const Matrix& hazards) {
  Matrix s(hazards.rows(), hazards.cols());
  for (Eigen::Index i = 0; i < hazards.rows(); ++i) {
    double run = 1.0;
    for (Eigen::Index b = 0; b < hazards.cols(); ++b) {
      run *= 1.0 - hazards(i, b);
      s(i, b) = run;
    }
  }
  return s;
}

}  // namespace mrepath
