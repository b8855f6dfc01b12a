#pragma once

#include "flexnac/types.hpp"

namespace flexnac {

/// Derivative of uniformly sampled data via a not-a-knot cubic spline.
/// Exact for cubic polynomials, including at both endpoints, which makes it
/// suitable for recovering θ̈ from logged θ̇. Requires at least 4 samples and
/// dt > 0; throws std::invalid_argument otherwise.
Vector spline_derivative(const Vector& y, double dt);

/// Column-wise spline_derivative: each column of y is one signal.
Matrix spline_derivative_columns(const Matrix& y, double dt);

} // namespace flexnac
