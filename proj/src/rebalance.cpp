#include "mrepath/rebalance.hpp"

#include <cmath>

#include "mrepath/ops.hpp"

namespace mrepath {

void init_confidence_params(ParamStore& store, const std::string& prefix, Eigen::Index d, Eigen::Index hidden,
                            Rng& rng) {
  store.add(prefix + ".W1", rng.normal_matrix(d, hidden, 1.0 / std::sqrt(double(d))));
  store.add(prefix + ".b1", Matrix::Zero(1, hidden));
  store.add(prefix + ".W2", rng.normal_matrix(hidden, 1, 1.0 / std::sqrt(double(hidden))));
  store.add(prefix + ".b2", Matrix::Zero(1, 1));
}

Var mono_confidence(const Var& features, ParamStore& params, const std::string& prefix, Activation sigma) {
  Tape& t = *features.tape();
  const Var pooled = row_mean(features);
  const Var hidden = activate(add_row(matmul(pooled, t.param(params, prefix + ".W1")), t.param(params, prefix + ".b1")),
                              sigma);
  // saturated logits would round to exactly 0 or 1; keep the score strictly inside (0, 1)
  return clamp(sigmoid(add_row(matmul(hidden, t.param(params, prefix + ".W2")), t.param(params, prefix + ".b2"))),
               kConfidenceEps, 1.0 - kConfidenceEps);
}

std::pair<double, double> mono_confidence(const Matrix& p_h, const Matrix& g, ParamStore& params,
                                          const std::string& prefix) {
  Tape t;
  const double wp = mono_confidence(t.constant(p_h), params, prefix + ".p").scalar();
  const double wg = mono_confidence(t.constant(g), params, prefix + ".g").scalar();
  return {wp, wg};
}

std::pair<Var, Var> holo_confidence(const Var& wpm, const Var& wgm) {
  const Var lp = log(clamp(wpm, kConfidenceEps, 1.0 - kConfidenceEps));
  const Var lg = log(clamp(wgm, kConfidenceEps, 1.0 - kConfidenceEps));
  const Var denom = add(lp, lg);
  return {cwise_div(lp, denom), cwise_div(lg, denom)};
}

std::pair<double, double> holo_confidence(double wpm, double wgm) {
  Tape t;
  auto [hp, hg] = holo_confidence(t.constant(Matrix::Constant(1, 1, wpm)), t.constant(Matrix::Constant(1, 1, wgm)));
  return {hp.scalar(), hg.scalar()};
}

std::pair<Var, Var> dynamic_weights(const Var& wpm, const Var& wgm, const Var& wph, const Var& wgh) {
  const Var w = softmax_rows(concat_cols({add(wpm, wph), add(wgm, wgh)}));
  return {element(w, 0, 0), element(w, 0, 1)};
}

std::pair<double, double> dynamic_weights(double wpm, double wgm, double wph, double wgh) {
  Tape t;
  auto c = [&t](double v) { return t.constant(Matrix::Constant(1, 1, v)); };
  auto [wp, wg] = dynamic_weights(c(wpm), c(wgm), c(wph), c(wgh));
  return {wp.scalar(), wg.scalar()};
}

std::pair<Var, Var> apply_weights(const Var& p_h, const Var& g, const Var& w_p, const Var& w_g) {
  return {scale(p_h, w_p), scale(g, w_g)};
}

std::pair<Matrix, Matrix> apply_weights(const Matrix& p_h, const Matrix& g, double w_p, double w_g) {
  return {p_h * w_p, g * w_g};
}

std::pair<double, double> fixed_weights(double w_p, double w_g) {
  if (!(w_p >= 0.0 && w_p <= 1.0 && w_g >= 0.0 && w_g <= 1.0))
    throw ConfigError("fixed weights must lie in [0, 1]");
  if (std::abs(w_p + w_g - 1.0) > 1e-9)
    throw ConfigError("fixed weights must sum to 1 (got " + std::to_string(w_p) + " + " + std::to_string(w_g) + ")");
  return {w_p, w_g};
}

std::pair<Var, Var> rebalance(const Var& p_h, const Var& g, ParamStore& params, const std::string& prefix,
                              Confidence* conf) {
  const Var wpm = mono_confidence(p_h, params, prefix + ".p");
  const Var wgm = mono_confidence(g, params, prefix + ".g");
  const auto [wph, wgh] = holo_confidence(wpm, wgm);
  const auto [wp, wg] = dynamic_weights(wpm, wgm, wph, wgh);
  if (conf != nullptr) {
    *conf = {wpm.scalar(), wgm.scalar(), wph.scalar(), wgh.scalar(), wp.scalar(), wg.scalar()};
  }
  return apply_weights(p_h, g, wp, wg);
}

}  // namespace mrepath
