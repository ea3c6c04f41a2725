#include "mrepath/params.hpp"

namespace mrepath {

Matrix& ParamStore::add(const std::string& name, Matrix value) {
  if (contains(name)) throw ConfigError("ParamStore: duplicate parameter '" + name + "'");
  index_[name] = names_.size();
  names_.push_back(name);
  grads_.push_back(Matrix::Zero(value.rows(), value.cols()));
  values_.push_back(std::move(value));
  return values_.back();
}

std::size_t ParamStore::slot(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("ParamStore: unknown parameter '" + name + "'");
  return it->second;
}

Matrix& ParamStore::value(const std::string& name) { return values_[slot(name)]; }
const Matrix& ParamStore::value(const std::string& name) const { return values_[slot(name)]; }
Matrix& ParamStore::grad(const std::string& name) { return grads_[slot(name)]; }
const Matrix& ParamStore::grad(const std::string& name) const { return grads_[slot(name)]; }

Eigen::Index ParamStore::numel() const {
  Eigen::Index n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

namespace {

Vector flatten(const std::vector<Matrix>& parts, Eigen::Index total) {
  Vector out(total);
  Eigen::Index k = 0;
  for (const auto& m : parts)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) out(k++) = m(r, c);
  return out;
}

}  // namespace

Vector ParamStore::flat() const { return flatten(values_, numel()); }
Vector ParamStore::flat_grad() const { return flatten(grads_, numel()); }

void ParamStore::set_flat(const Vector& v) {
  require_shape(v.size() == numel(), "ParamStore::set_flat: expected " + std::to_string(numel()) +
                                         " values, got " + std::to_string(v.size()));
  Eigen::Index k = 0;
  for (auto& m : values_)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = v(k++);
}

void ParamStore::zero_grad() {
  for (auto& g : grads_) g.setZero();
}

}  // namespace mrepath
