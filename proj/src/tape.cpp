#include "mrepath/tape.hpp"

namespace mrepath {

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::variable(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::param(ParamStore& store, const std::string& name) {
  const auto key = std::make_pair(static_cast<const ParamStore*>(&store), name);
  if (auto it = params_.find(key); it != params_.end()) return it->second;
  Node n;
  n.value = store.value(name);
  n.requires_grad = true;
  n.sink = &store.grad(name);
  Var v = push(std::move(n));
  params_.emplace(key, v);
  return v;
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, Backward fn) {
  return record(std::move(value), std::vector<Var>(inputs), std::move(fn));
}

Var Tape::record(Matrix value, const std::vector<Var>& inputs, Backward fn) {
  Node n;
  n.value = std::move(value);
  for (const auto& in : inputs) {
    if (in.tape() != this) throw ShapeError("Tape::record: input from a different tape");
    n.requires_grad = n.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

void Tape::accumulate(const Var& v, const Matrix& g) {
  Node& n = nodes_[v.id()];
  if (!n.requires_grad) return;
  require_shape(g.rows() == n.value.rows() && g.cols() == n.value.cols(),
                "Tape::accumulate: gradient " + shape_str(g.rows(), g.cols()) + " for value " +
                    shape_str(n.value.rows(), n.value.cols()));
  if (n.grad.size() == 0)
    n.grad = g;
  else
    n.grad += g;
}

void Tape::backward(const Var& output) {
  require_shape(output.rows() == 1 && output.cols() == 1, "Tape::backward: output must be 1x1");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[output.id()].grad = Matrix::Ones(1, 1);
  for (std::size_t i = output.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, n.grad);
    if (n.sink != nullptr) *n.sink += n.grad;
  }
}

}  // namespace mrepath
