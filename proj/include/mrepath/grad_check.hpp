#pragma once

#include <functional>
#include <string>

#include "mrepath/params.hpp"

namespace mrepath {

/// Loss callback for grad_check: evaluate the loss at the store's current
/// values and write the analytic gradient into the store's (pre-zeroed) grad buffers.
using LossFn = std::function<double(ParamStore&)>;

struct GradCheckReport {
  bool passed = false;
  bool finite = true;
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  Eigen::Index checked = 0;
  std::string message;
};

/// Central-difference check of every parameter entry.
///
/// Relative error per entry is |analytic - numeric| / max(|analytic|, |numeric|, abs_floor);
/// the floor keeps entries whose true gradient is ~0 from dominating. Passes iff
/// every loss evaluation is finite and max_rel_err < tol. Parameter values are
/// restored before returning.
GradCheckReport grad_check(const LossFn& f, ParamStore& params, double eps, double tol,
                           double abs_floor = 1e-6);

}  // namespace mrepath
