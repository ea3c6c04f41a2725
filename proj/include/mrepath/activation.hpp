#pragma once

#include <string>

#include "mrepath/matrix.hpp"

namespace mrepath {

/// Elementwise nonlinearity. ELU uses alpha = 1, which makes it C1 at zero.
enum class Activation { Identity, ReLU, ELU };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

Matrix apply_activation(const Matrix& x, Activation a);
/// Elementwise derivative evaluated at the pre-activation x.
Matrix activation_derivative(const Matrix& x, Activation a);

}  // namespace mrepath
