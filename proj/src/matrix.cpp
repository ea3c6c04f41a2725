#include "mrepath/matrix.hpp"

namespace mrepath {

Matrix reshape_row_major(const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  require_shape(rows * cols == m.size(), "reshape: " + shape_str(m.rows(), m.cols()) + " -> " +
                                             shape_str(rows, cols));
  Matrix out(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c, ++k) out(k / cols, k % cols) = m(r, c);
  }
  return out;
}

}  // namespace mrepath
