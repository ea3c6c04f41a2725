#include "mrepath/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace mrepath {

GradCheckReport grad_check(const LossFn& f, ParamStore& params, double eps, double tol,
                           double abs_floor) {
  GradCheckReport report;
  params.zero_grad();
  const double base = f(params);
  if (!std::isfinite(base)) {
    report.finite = false;
    report.message = "loss is not finite at the evaluation point";
    return report;
  }
  const Vector analytic = params.flat_grad();
  if (!analytic.allFinite()) {
    report.finite = false;
    report.message = "analytic gradient contains non-finite entries";
    return report;
  }
  const Vector theta = params.flat();

  // map flat index -> parameter name for diagnostics
  std::vector<std::pair<Eigen::Index, std::string>> offsets;
  Eigen::Index off = 0;
  for (const auto& name : params.names()) {
    offsets.emplace_back(off, name);
    off += params.value(name).size();
  }

  Vector probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe(i) = theta(i) + eps;
    params.set_flat(probe);
    params.zero_grad();
    const double up = f(params);
    probe(i) = theta(i) - eps;
    params.set_flat(probe);
    params.zero_grad();
    const double down = f(params);
    probe(i) = theta(i);
    if (!std::isfinite(up) || !std::isfinite(down)) {
      report.finite = false;
      report.message = "loss is not finite under perturbation of entry " + std::to_string(i);
      break;
    }
    const double numeric = (up - down) / (2.0 * eps);
    const double abs_err = std::abs(numeric - analytic(i));
    const double rel_err = abs_err / std::max({std::abs(numeric), std::abs(analytic(i)), abs_floor});
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    if (rel_err > report.max_rel_err || report.worst_index < 0) {
      report.max_rel_err = std::max(report.max_rel_err, rel_err);
      if (rel_err >= report.max_rel_err) {
        auto it = std::upper_bound(offsets.begin(), offsets.end(), i,
                                   [](Eigen::Index v, const auto& p) { return v < p.first; });
        --it;
        report.worst_param = it->second;
        report.worst_index = i - it->first;
      }
    }
    ++report.checked;
  }

  params.set_flat(theta);
  params.zero_grad();
  f(params);
  report.passed = report.finite && report.max_rel_err < tol;
  if (report.message.empty())
    report.message = "max relative error " + std::to_string(report.max_rel_err) + " at " +
                     report.worst_param + "[" + std::to_string(report.worst_index) + "]";
  return report;
}

}  // namespace mrepath
