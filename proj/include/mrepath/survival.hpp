#pragma once

#include <string>
#include <vector>

#include "mrepath/matrix.hpp"
#include "mrepath/tape.hpp"

namespace mrepath {

/// Censoring follows the convention c = 0: event observed, c = 1: censored.
struct SurvLabel {
  int c = 0;
  double t = 0.0;
  int bin = 0;
};

/// Clamp applied to hazards inside the likelihood.
inline constexpr double kHazardEps = 1e-7;

/// Interior bin edges; bin b covers (edge[b-1], edge[b]] with open outer ends.
struct BinEdges {
  std::vector<double> edges;
  std::vector<std::string> warnings;

  int bins() const { return static_cast<int>(edges.size()) + 1; }
  int assign(double t) const;
};

/// Edges at the inverse-ECDF quantiles 1/B, ..., (B-1)/B of the uncensored
/// times. Falls back to all times (with a warning) when there are fewer than B
/// distinct uncensored times; warns when edges coincide.
BinEdges make_bins(const std::vector<SurvLabel>& labels, int bins);

/// Sets label.bin for every label.
void assign_bins(std::vector<SurvLabel>& labels, const BinEdges& edges);

/// Mean over subjects of -[(1-c) log h(b) + c log S(b) + (1-c) log S(b-1)], S(-1) = 1.
/// Hazards (n x B) are clamped to [eps, 1 - eps].
double nll_loss(const Matrix& hazards, const std::vector<SurvLabel>& labels);

/// Differentiable version; the clamp passes zero gradient.
Var nll_loss(const Var& hazards, const std::vector<SurvLabel>& labels);

/// r = -sum_b S(t_b) per row of hazards.
Vector risk_scores(const Matrix& hazards);

/// Harrell's C: pairs (i, j) with c_i = 0 and t_i < t_j are comparable; credit 1
/// when r_i > r_j and 0.5 on ties. Throws NumericError with no comparable pair.
double c_index(const Vector& risks, const std::vector<SurvLabel>& labels);

struct KmPoint {
  double time = 0.0;
  double survival = 1.0;
  int at_risk = 0;
  int events = 0;
  int censored = 0;
};

/// Product-limit step function. points[0] is (0, 1); one point per distinct observed time after that.
struct KmCurve {
  std::vector<KmPoint> points;
  double survival_at(double t) const;
};

KmCurve kaplan_meier(const std::vector<SurvLabel>& labels);

struct LogRankResult {
  double chi2 = 0.0;
  double p = 1.0;
  double observed_a = 0.0;
  double expected_a = 0.0;
  double variance = 0.0;
  std::vector<std::string> warnings;
};

LogRankResult log_rank(const std::vector<SurvLabel>& group_a, const std::vector<SurvLabel>& group_b);

/// Upper tail of the chi-square distribution with one degree of freedom.
double chi2_sf_1dof(double x);

struct RiskSplit {
  std::vector<int> low;
  std::vector<int> high;
  double median = 0.0;
  std::vector<std::string> warnings;
};

/// Risks strictly above the median go to the high-risk group; ties at the median stay low.
RiskSplit median_split(const Vector& risks);

}  // namespace mrepath
