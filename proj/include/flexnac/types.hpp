#pragma once

#include <Eigen/Core>

namespace flexnac {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using Index = Eigen::Index;

/// sgn with sgn(0) = 0, the convention used by every friction and robust term.
inline double sgn0(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace flexnac
