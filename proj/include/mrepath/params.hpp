#pragma once

#include <map>
#include <string>
#include <vector>

#include "mrepath/matrix.hpp"

namespace mrepath {

/// Named parameter tensors with matching gradient buffers.
///
/// Insertion order fixes the layout of the flat view, so two stores built by
/// the same code path flatten identically.
class ParamStore {
 public:
  /// Adds a parameter. Throws ConfigError on a duplicate name.
  Matrix& add(const std::string& name, Matrix value);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  Matrix& value(const std::string& name);
  const Matrix& value(const std::string& name) const;
  Matrix& grad(const std::string& name);
  const Matrix& grad(const std::string& name) const;

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  /// Total scalar count.
  Eigen::Index numel() const;

  Vector flat() const;
  void set_flat(const Vector& v);
  Vector flat_grad() const;

  void zero_grad();

 private:
  std::size_t slot(const std::string& name) const;

  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::vector<Matrix> grads_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace mrepath
