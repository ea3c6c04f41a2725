#pragma once

#include <string>
#include <utility>

#include "mrepath/activation.hpp"
#include "mrepath/params.hpp"
#include "mrepath/rng.hpp"
#include "mrepath/tape.hpp"

namespace mrepath {

/// Clamp applied to mono-confidences before taking logs.
inline constexpr double kConfidenceEps = 1e-7;

struct Confidence {
  double mono_p = 0.5, mono_g = 0.5;
  double holo_p = 0.5, holo_g = 0.5;
  double w_p = 0.5, w_g = 0.5;
};

/// Mono-confidence scorer: mean-pool rows, one hidden layer, logistic output clamped to [eps, 1 - eps].
/// Parameters "<prefix>.W1" (d x hidden), "<prefix>.b1", "<prefix>.W2" (hidden x 1), "<prefix>.b2".
void init_confidence_params(ParamStore& store, const std::string& prefix, Eigen::Index d, Eigen::Index hidden,
                            Rng& rng);

Var mono_confidence(const Var& features, ParamStore& params, const std::string& prefix,
                    Activation sigma = Activation::ELU);

/// (w_p^m, w_g^m) for pathology and genomics using "<prefix>.p" and "<prefix>.g" scorers.
std::pair<double, double> mono_confidence(const Matrix& p_h, const Matrix& g, ParamStore& params,
                                          const std::string& prefix);

/// holo_p = log(wpm) / (log wpm + log wgm), and symmetrically for holo_g, after
/// clamping both inputs to [eps, 1 - eps]. The clamp passes zero gradient.
std::pair<Var, Var> holo_confidence(const Var& wpm, const Var& wgm);
std::pair<double, double> holo_confidence(double wpm, double wgm);

/// softmax(wpm + wph, wgm + wgh).
std::pair<Var, Var> dynamic_weights(const Var& wpm, const Var& wgm, const Var& wph, const Var& wgh);
std::pair<double, double> dynamic_weights(double wpm, double wgm, double wph, double wgh);

std::pair<Var, Var> apply_weights(const Var& p_h, const Var& g, const Var& w_p, const Var& w_g);
std::pair<Matrix, Matrix> apply_weights(const Matrix& p_h, const Matrix& g, double w_p, double w_g);

/// Validates a manual weighting; throws ConfigError unless both lie in [0, 1] and sum to 1.
std::pair<double, double> fixed_weights(double w_p, double w_g);

/// Full chain for one subject. Fills `conf` with the scalar values when non-null.
std::pair<Var, Var> rebalance(const Var& p_h, const Var& g, ParamStore& params, const std::string& prefix,
                              Confidence* conf = nullptr);

}  // namespace mrepath
