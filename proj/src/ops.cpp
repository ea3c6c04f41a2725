#include "mrepath/ops.hpp"

#include <cmath>

namespace mrepath {

namespace {

Tape& tape_of(const Var& a) {
  if (!a.valid()) throw ShapeError("operation on an empty Var");
  return *a.tape();
}

void same_shape(const Var& a, const Var& b, const char* op) {
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(),
                std::string(op) + ": " + shape_str(a.rows(), a.cols()) + " vs " +
                    shape_str(b.rows(), b.cols()));
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  Matrix out = mrepath::matmul(a.value(), b.value());
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g * b.value().transpose());
    if (tp.requires_grad(b)) tp.accumulate(b, a.value().transpose() * g);
  });
}

Var add(const Var& a, const Var& b) {
  same_shape(a, b, "add");
  return tape_of(a).record(a.value() + b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  });
}

Var sub(const Var& a, const Var& b) {
  same_shape(a, b, "sub");
  return tape_of(a).record(a.value() - b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    if (tp.requires_grad(b)) tp.accumulate(b, -g);
  });
}

Var add_row(const Var& a, const Var& row) {
  require_shape(row.rows() == 1 && row.cols() == a.cols(),
                "add_row: " + shape_str(a.rows(), a.cols()) + " + " + shape_str(row.rows(), row.cols()));
  Matrix out = a.value().rowwise() + row.value().row(0);
  return tape_of(a).record(std::move(out), {a, row}, [a, row](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    if (tp.requires_grad(row)) tp.accumulate(row, g.colwise().sum());
  });
}

Var scale(const Var& a, double s) {
  return tape_of(a).record(a.value() * s, {a}, [a, s](Tape& tp, const Matrix& g) { tp.accumulate(a, g * s); });
}

Var scale(const Var& a, const Var& s) {
  require_shape(s.rows() == 1 && s.cols() == 1, "scale: factor must be 1x1");
  const double f = s.scalar();
  return tape_of(a).record(a.value() * f, {a, s}, [a, s, f](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g * f);
    if (tp.requires_grad(s)) tp.accumulate(s, Matrix::Constant(1, 1, g.cwiseProduct(a.value()).sum()));
  });
}

Var hadamard(const Var& a, const Var& b) {
  same_shape(a, b, "hadamard");
  return tape_of(a).record(a.value().cwiseProduct(b.value()), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g.cwiseProduct(b.value()));
    if (tp.requires_grad(b)) tp.accumulate(b, g.cwiseProduct(a.value()));
  });
}

Var cwise_div(const Var& a, const Var& b) {
  same_shape(a, b, "cwise_div");
  Matrix out = a.value().cwiseQuotient(b.value());
  return tape_of(a).record(out, {a, b}, [a, b, out](Tape& tp, const Matrix& g) {
    Matrix gb = g.cwiseQuotient(b.value());
    if (tp.requires_grad(a)) tp.accumulate(a, gb);
    if (tp.requires_grad(b)) tp.accumulate(b, -gb.cwiseProduct(out));
  });
}

Var activate(const Var& a, Activation act) {
  if (act == Activation::Identity) return a;
  return tape_of(a).record(apply_activation(a.value(), act), {a}, [a, act](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.cwiseProduct(activation_derivative(a.value(), act)));
  });
}

Var sigmoid(const Var& a) {
  Matrix out = a.value().unaryExpr([](double v) {
    // stable in both tails
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
  return tape_of(a).record(out, {a}, [a, out](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.cwiseProduct(out.cwiseProduct((1.0 - out.array()).matrix())));
  });
}

Var log(const Var& a) {
  Matrix out = a.value().array().log().matrix();
  return tape_of(a).record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.cwiseQuotient(a.value()));
  });
}

Var clamp(const Var& a, double lo, double hi) {
  Matrix out = a.value().cwiseMax(lo).cwiseMin(hi);
  return tape_of(a).record(std::move(out), {a}, [a, lo, hi](Tape& tp, const Matrix& g) {
    const Matrix& x = a.value();
    Matrix mask = x.unaryExpr([lo, hi](double v) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
    tp.accumulate(a, g.cwiseProduct(mask));
  });
}

Var softmax_rows(const Var& a) {
  Matrix out = mrepath::softmax_rows(a.value());
  return tape_of(a).record(out, {a}, [a, out](Tape& tp, const Matrix& g) {
    // dx = y * (g - rowsum(g * y))
    Vector inner = g.cwiseProduct(out).rowwise().sum();
    Matrix gx = out.cwiseProduct((g.colwise() - inner));
    tp.accumulate(a, gx);
  });
}

Var row_mean(const Var& a) {
  require_shape(a.rows() > 0, "row_mean: empty matrix");
  const double n = static_cast<double>(a.rows());
  Matrix out = a.value().colwise().mean();
  return tape_of(a).record(std::move(out), {a}, [a, n](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.replicate(a.rows(), 1) / n);
  });
}

Var sum(const Var& a) {
  return tape_of(a).record(Matrix::Constant(1, 1, a.value().sum()), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  require_shape(!parts.empty(), "concat_cols: no inputs");
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    require_shape(p.rows() == parts.front().rows(), "concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix out(parts.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return tape_of(parts.front()).record(std::move(out), parts, [parts](Tape& tp, const Matrix& g) {
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      if (tp.requires_grad(p)) tp.accumulate(p, g.middleCols(off, p.cols()));
      off += p.cols();
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  require_shape(!parts.empty(), "concat_rows: no inputs");
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    require_shape(p.cols() == parts.front().cols(), "concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, parts.front().cols());
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return tape_of(parts.front()).record(std::move(out), parts, [parts](Tape& tp, const Matrix& g) {
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      if (tp.requires_grad(p)) tp.accumulate(p, g.middleRows(off, p.rows()));
      off += p.rows();
    }
  });
}

Var transpose(const Var& a) {
  return tape_of(a).record(a.value().transpose(), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.transpose());
  });
}

Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols) {
  Matrix out = reshape_row_major(a.value(), rows, cols);
  return tape_of(a).record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, reshape_row_major(g, a.rows(), a.cols()));
  });
}

Var element(const Var& a, Eigen::Index r, Eigen::Index c) {
  require_shape(r >= 0 && r < a.rows() && c >= 0 && c < a.cols(), "element: index out of range");
  return tape_of(a).record(Matrix::Constant(1, 1, a.value()(r, c)), {a}, [a, r, c](Tape& tp, const Matrix& g) {
    Matrix ga = Matrix::Zero(a.rows(), a.cols());
    ga(r, c) = g(0, 0);
    tp.accumulate(a, ga);
  });
}

}  // namespace mrepath
