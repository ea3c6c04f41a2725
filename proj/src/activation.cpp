#include "mrepath/activation.hpp"

namespace mrepath {

Activation parse_activation(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::ReLU;
  if (name == "elu") return Activation::ELU;
  throw ConfigError("unknown activation '" + name + "' (expected identity, relu, elu)");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::ReLU: return "relu";
    case Activation::ELU: return "elu";
  }
  return "identity";
}

Matrix apply_activation(const Matrix& x, Activation a) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::ReLU: return x.cwiseMax(0.0);
    case Activation::ELU:
      return x.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
  }
  return x;
}

Matrix activation_derivative(const Matrix& x, Activation a) {
  switch (a) {
    case Activation::Identity: return Matrix::Ones(x.rows(), x.cols());
    case Activation::ReLU: return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::ELU: return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
  }
  return Matrix::Ones(x.rows(), x.cols());
}

}  // namespace mrepath
