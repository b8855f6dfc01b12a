#include "flexnac/spline.hpp"

#include <stdexcept>
#include <vector>

namespace flexnac {

namespace {

// Knot second derivatives M_i of the not-a-knot cubic spline on a uniform
// grid. The not-a-knot conditions M_0 = 2M_1 - M_2 and
// M_{n-1} = 2M_{n-2} - M_{n-3} collapse the boundary rows to
// M_1 = d_1 and M_{n-2} = d_{n-2}, with d_i = (y_{i-1} - 2y_i + y_{i+1})/h²,
// leaving a strictly diagonally dominant tridiagonal system for the rest.
Vector knot_second_derivatives(const Vector& y, double h) {
  const Index n = y.size();
  Vector d(n);
  for (Index i = 1; i + 1 < n; ++i) {
    d[i] = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h);
  }
  Vector m(n);
  m[1] = d[1];
  m[n - 2] = d[n - 2];

  const Index interior = n - 4; // unknowns M_2 .. M_{n-3}
  if (interior > 0) {
    Vector rhs(interior);
    for (Index j = 0; j < interior; ++j) rhs[j] = 6.0 * d[j + 2];
    rhs[0] -= m[1];
    rhs[interior - 1] -= m[n - 2];

    // Thomas algorithm, diagonal 4 and off-diagonals 1.
    std::vector<double> diag(static_cast<std::size_t>(interior), 4.0);
    for (Index j = 1; j < interior; ++j) {
      const double w = 1.0 / diag[static_cast<std::size_t>(j - 1)];
      diag[static_cast<std::size_t>(j)] -= w;
      rhs[j] -= w * rhs[j - 1];
    }
    rhs[interior - 1] /= diag[static_cast<std::size_t>(interior - 1)];
    for (Index j = interior - 2; j >= 0; --j) {
      rhs[j] = (rhs[j] - rhs[j + 1]) / diag[static_cast<std::size_t>(j)];
    }
    for (Index j = 0; j < interior; ++j) m[j + 2] = rhs[j];
  }

  m[0] = 2.0 * m[1] - m[2];
  m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
  return m;
}

} // namespace

Vector spline_derivative(const Vector& y, double dt) {
  const Index n = y.size();
  if (n < 4) {
    throw std::invalid_argument("spline_derivative: need at least 4 samples");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("spline_derivative: dt must be positive");
  }
  const Vector m = knot_second_derivatives(y, dt);
  Vector dy(n);
  for (Index i = 0; i + 1 < n; ++i) {
    dy[i] = (y[i + 1] - y[i]) / dt - dt * (2.0 * m[i] + m[i + 1]) / 6.0;
  }
  dy[n - 1] =
      (y[n - 1] - y[n - 2]) / dt + dt * (m[n - 2] + 2.0 * m[n - 1]) / 6.0;
  return dy;
}

Matrix spline_derivative_columns(const Matrix& y, double dt) {
  Matrix out(y.rows(), y.cols());
  for (Index c = 0; c < y.cols(); ++c) {
    out.col(c) = spline_derivative(y.col(c), dt);
  }
  return out;
}

} // namespace flexnac
