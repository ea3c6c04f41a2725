#pragma once

#include <vector>

#include "mrepath/activation.hpp"
#include "mrepath/tape.hpp"

namespace mrepath {

// Differentiable operations on tape variables. Every op checks shapes and
// throws ShapeError on mismatch.

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
/// a (r x c) plus a 1 x c row broadcast over rows.
Var add_row(const Var& a, const Var& row);
Var scale(const Var& a, double s);
/// a scaled by a 1x1 variable.
Var scale(const Var& a, const Var& s);
Var hadamard(const Var& a, const Var& b);
Var cwise_div(const Var& a, const Var& b);

Var activate(const Var& a, Activation act);
Var sigmoid(const Var& a);
Var log(const Var& a);
/// Elementwise clamp to [lo, hi]; gradient is zero where the input was clamped.
Var clamp(const Var& a, double lo, double hi);
Var softmax_rows(const Var& a);

/// Mean over rows, giving 1 x c.
Var row_mean(const Var& a);
/// Sum of all entries, giving 1x1.
Var sum(const Var& a);

Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var transpose(const Var& a);
/// Row-major reshape.
Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols);
/// Single entry as 1x1.
Var element(const Var& a, Eigen::Index r, Eigen::Index c);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }

}  // namespace mrepath
