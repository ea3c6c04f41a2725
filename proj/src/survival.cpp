#include "mrepath/survival.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mrepath {

int BinEdges::assign(double t) const {
  // right-closed: first edge with t <= edge
  return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), t) - edges.begin());
}

namespace {

std::vector<double> quantile_edges(std::vector<double> times, int bins) {
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  std::vector<double> edges;
  for (int q = 1; q < bins; ++q) {
    // smallest x_(i) with i / n >= q / B, i.e. i = ceil(n q / B)
    std::size_t idx = (n * q + bins - 1) / bins;
    idx = std::clamp<std::size_t>(idx, 1, n);
    edges.push_back(times[idx - 1]);
  }
  return edges;
}

}  // namespace

BinEdges make_bins(const std::vector<SurvLabel>& labels, int bins) {
  if (bins < 1) throw ConfigError("make_bins: bin count must be >= 1");
  if (labels.empty()) throw DataError("make_bins: no subjects");
  BinEdges out;
  std::vector<double> events, all;
  for (const auto& l : labels) {
    all.push_back(l.t);
    if (l.c == 0) events.push_back(l.t);
  }
  const std::set<double> distinct(events.begin(), events.end());
  if (static_cast<int>(distinct.size()) < bins) {
    out.warnings.push_back("only " + std::to_string(distinct.size()) +
                           " distinct uncensored times; using quantiles of all times");
    out.edges = quantile_edges(all, bins);
  } else {
    out.edges = quantile_edges(events, bins);
  }
  if (std::adjacent_find(out.edges.begin(), out.edges.end()) != out.edges.end())
    out.warnings.push_back("degenerate bins: coinciding edges");
  return out;
}

void assign_bins(std::vector<SurvLabel>& labels, const BinEdges& edges) {
  for (auto& l : labels) l.bin = edges.assign(l.t);
}

namespace {

void check_labels(const Matrix& hazards, const std::vector<SurvLabel>& labels) {
  require_shape(static_cast<std::size_t>(hazards.rows()) == labels.size(),
                "nll_loss: " + std::to_string(hazards.rows()) + " hazard rows for " +
                    std::to_string(labels.size()) + " labels");
  for (const auto& l : labels)
    require_shape(l.bin >= 0 && l.bin < hazards.cols(), "nll_loss: label bin out of range");
}

double clamp_hazard(double h) { return std::clamp(h, kHazardEps, 1.0 - kHazardEps); }

}  // namespace

double nll_loss(const Matrix& hazards, const std::vector<SurvLabel>& labels) {
  check_labels(hazards, labels);
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    const auto row = static_cast<Eigen::Index>(i);
    double log_s_prev = 0.0;  // log S(b - 1)
    for (int tau = 0; tau < l.bin; ++tau) log_s_prev += std::log1p(-clamp_hazard(hazards(row, tau)));
    const double h_b = clamp_hazard(hazards(row, l.bin));
    const double log_s = log_s_prev + std::log1p(-h_b);
    const double uncens = 1.0 - l.c;
    total -= uncens * std::log(h_b) + l.c * log_s + uncens * log_s_prev;
  }
  return total / static_cast<double>(labels.size());
}

Var nll_loss(const Var& hazards, const std::vector<SurvLabel>& labels) {
  const Matrix& h = hazards.value();
  const double loss = nll_loss(h, labels);
  return hazards.tape()->record(Matrix::Constant(1, 1, loss), {hazards}, [hazards, labels](Tape& tp, const Matrix& g) {
    const Matrix& hv = hazards.value();
    Matrix grad = Matrix::Zero(hv.rows(), hv.cols());
    const double scale = g(0, 0) / static_cast<double>(labels.size());
    auto inside = [](double v) { return v >= kHazardEps && v <= 1.0 - kHazardEps; };
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const auto& l = labels[i];
      for (int tau = 0; tau < l.bin; ++tau) {
        const double v = hv(row, tau);
        if (inside(v)) grad(row, tau) = scale / (1.0 - v);
      }
      const double v = hv(row, l.bin);
      if (inside(v)) grad(row, l.bin) = scale * (-(1.0 - l.c) / v + l.c / (1.0 - v));
    }
    tp.accumulate(hazards, grad);
  });
}

Vector risk_scores(const Matrix& hazards) {
  const Matrix s = [&] {
    Matrix out(hazards.rows(), hazards.cols());
    for (Eigen::Index i = 0; i < hazards.rows(); ++i) {
      double run = 1.0;
      for (Eigen::Index b = 0; b < hazards.cols(); ++b) out(i, b) = (run *= 1.0 - hazards(i, b));
    }
    return out;
  }();
  return -s.rowwise().sum();
}

double c_index(const Vector& risks, const std::vector<SurvLabel>& labels) {
  require_shape(static_cast<std::size_t>(risks.size()) == labels.size(), "c_index: risk/label count mismatch");
  // count in half-units so the result is a single exact division
  long long credit = 0;
  long long pairs = 0;
  const auto n = static_cast<Eigen::Index>(labels.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i].c != 0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(labels[i].t < labels[j].t)) continue;
      ++pairs;
      if (risks(i) > risks(j))
        credit += 2;
      else if (risks(i) == risks(j))
        credit += 1;
    }
  }
  if (pairs == 0) throw NumericError("c_index: no comparable pairs");
  return static_cast<double>(credit) / static_cast<double>(2 * pairs);
}

double KmCurve::survival_at(double t) const {
  double s = 1.0;
  for (const auto& p : points) {
    if (p.time > t) break;
    s = p.survival;
  }
  return s;
}

KmCurve kaplan_meier(const std::vector<SurvLabel>& labels) {
  KmCurve curve;
  curve.points.push_back({0.0, 1.0, static_cast<int>(labels.size()), 0, 0});
  std::vector<double> times;
  for (const auto& l : labels) times.push_back(l.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  double s = 1.0;
  for (double t : times) {
    KmPoint p;
    p.time = t;
    for (const auto& l : labels) {
      if (l.t >= t) ++p.at_risk;
      if (l.t == t) (l.c == 0 ? p.events : p.censored) += 1;
    }
    if (p.events > 0) s *= 1.0 - static_cast<double>(p.events) / p.at_risk;
    p.survival = s;
    if (t == 0.0) {
      curve.points.front() = p;
    } else {
      curve.points.push_back(p);
    }
  }
  return curve;
}

double chi2_sf_1dof(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * x));
}

LogRankResult log_rank(const std::vector<SurvLabel>& group_a, const std::vector<SurvLabel>& group_b) {
  if (group_a.empty() || group_b.empty()) throw DataError("log_rank: both groups must be nonempty");
  LogRankResult out;
  std::vector<double> event_times;
  for (const auto* g : {&group_a, &group_b})
    for (const auto& l : *g)
      if (l.c == 0) event_times.push_back(l.t);
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  if (event_times.empty()) {
    out.warnings.push_back("log_rank: no events; p = 1 by convention");
    return out;
  }
  for (double t : event_times) {
    double n_a = 0, n_b = 0, d_a = 0, d_b = 0;
    for (const auto& l : group_a) {
      if (l.t >= t) ++n_a;
      if (l.t == t && l.c == 0) ++d_a;
    }
    for (const auto& l : group_b) {
      if (l.t >= t) ++n_b;
      if (l.t == t && l.c == 0) ++d_b;
    }
    const double n = n_a + n_b;
    const double d = d_a + d_b;
    out.observed_a += d_a;
    out.expected_a += d * n_a / n;
    if (n > 1.0) out.variance += d * (n_a / n) * (n_b / n) * (n - d) / (n - 1.0);
  }
  if (out.variance <= 0.0) {
    out.warnings.push_back("log_rank: zero variance; p = 1 by convention");
    return out;
  }
  const double diff = out.observed_a - out.expected_a;
  out.chi2 = diff * diff / out.variance;
  out.p = chi2_sf_1dof(out.chi2);
  return out;
}

RiskSplit median_split(const Vector& risks) {
  if (risks.size() < 2) throw DataError("median_split: need at least 2 subjects");
  RiskSplit out;
  std::vector<double> sorted(risks.data(), risks.data() + risks.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  out.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  for (Eigen::Index i = 0; i < risks.size(); ++i) (risks(i) > out.median ? out.high : out.low).push_back(static_cast<int>(i));
  if (out.high.empty()) out.warnings.push_back("median_split: no subject above the median (all risks tied)");
  return out;
}

}  // namespace mrepath
