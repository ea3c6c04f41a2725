#pragma once

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mrepath/matrix.hpp"
#include "mrepath/params.hpp"

namespace mrepath {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 variable.
  double scalar() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Minimal reverse-mode tape over whole-matrix operations.
///
/// Nodes are appended in evaluation order, so the tape is already a
/// topological order and backward() is a single reverse sweep. Leaves created
/// with param() route their gradient into the owning ParamStore.
class Tape {
 public:
  /// Receives dLoss/dOutput and pushes gradients to inputs via accumulate().
  using Backward = std::function<void(Tape&, const Matrix&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var variable(Matrix value);
  /// Leaf bound to a stored parameter. Repeated calls return the same Var.
  Var param(ParamStore& store, const std::string& name);

  /// Records an op result. `fn` runs only if some input requires a gradient.
  Var record(Matrix value, std::initializer_list<Var> inputs, Backward fn);
  Var record(Matrix value, const std::vector<Var>& inputs, Backward fn);

  const Matrix& value(const Var& v) const { return nodes_[v.id_].value; }
  /// Gradient of the last backward() target with respect to v (zero-size if unreached).
  const Matrix& grad(const Var& v) const { return nodes_[v.id_].grad; }
  bool requires_grad(const Var& v) const { return nodes_[v.id_].requires_grad; }

  void accumulate(const Var& v, const Matrix& g);

  /// Reverse sweep from a 1x1 output. Param leaves add into their store's gradient.
  void backward(const Var& output);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
    Matrix* sink = nullptr;
    bool requires_grad = false;
  };

  Var push(Node node);

  std::deque<Node> nodes_;
  std::map<std::pair<const ParamStore*, std::string>, Var> params_;
};

inline const Matrix& Var::value() const { return tape_->value(*this); }

inline double Var::scalar() const {
  require_shape(rows() == 1 && cols() == 1, "scalar(): variable is " + shape_str(rows(), cols()));
  return value()(0, 0);
}

}  // namespace mrepath
