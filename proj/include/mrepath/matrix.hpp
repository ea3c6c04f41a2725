#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "mrepath/errors.hpp"

namespace mrepath {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> matmul(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  require_shape(a.cols() == b.rows(), "matmul: " + shape_str(a.rows(), a.cols()) + " * " +
                                          shape_str(b.rows(), b.cols()));
  return a * b;
}

/// Row-wise softmax with max subtraction. Every output row sums to one.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> softmax_rows(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Scalar mx = m.row(r).maxCoeff();
    out.row(r) = (m.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

/// Cosine similarity. Two zero vectors (or one) give 0 by convention.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar cosine_sim(const Eigen::MatrixBase<DerivedU>& u,
                                     const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  require_shape(u.size() == v.size(), "cosine_sim: length mismatch");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) return Scalar(0);
  const Scalar c = u.reshaped().dot(v.reshaped()) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Copy an r x c matrix into shape (rows x cols) following row-major element order.
Matrix reshape_row_major(const Matrix& m, Eigen::Index rows, Eigen::Index cols);

}  // namespace mrepath
