#include "flexnac/control.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

#include "flexnac/dynamics.hpp"

namespace flexnac {

void Gains::validate(Index n_joints) const {
  if (lambda.size() != n_joints || k_s.size() != n_joints) {
    throw std::invalid_argument("Gains: lambda/k_s size != n_joints");
  }
  if ((lambda.array() <= 0.0).any() || (k_s.array() < 0.0).any()) {
    throw std::invalid_argument("Gains: lambda must be positive, k_s non-negative");
  }
  if (k_robust < 0.0) throw std::invalid_argument("Gains: k_robust negative");
  if (boundary_layer <= 0.0) {
    throw std::invalid_argument("Gains: boundary_layer must be positive");
  }
  if (p_adapt.rows() != p_adapt.cols() || p_adapt.rows() < 1) {
    throw std::invalid_argument("Gains: p_adapt must be square");
  }
  if (!p_adapt.isApprox(p_adapt.transpose())) {
    throw std::invalid_argument("Gains: p_adapt must be symmetric");
  }
}

Gains make_gains(Index n_joints, Index basis_dim, double lambda, double k_s,
                 double k_robust, double boundary_layer, double p_adapt) {
  Gains g;
  g.lambda = Vector::Constant(n_joints, lambda);
  g.k_s = Vector::Constant(n_joints, k_s);
  g.k_robust = k_robust;
  g.boundary_layer = boundary_layer;
  g.p_adapt = p_adapt * Matrix::Identity(basis_dim, basis_dim);
  g.validate(n_joints);
  return g;
}

ReferenceState reference_signals(const Vector& theta, const Vector& theta_dot,
                                 const Vector& theta_d,
                                 const Vector& theta_d_dot,
                                 const Vector& theta_d_ddot,
                                 const Gains& gains) {
  const Index n = theta.size();
  if (theta_dot.size() != n || theta_d.size() != n ||
      theta_d_dot.size() != n || theta_d_ddot.size() != n ||
      gains.lambda.size() != n) {
    throw std::invalid_argument("reference_signals: size mismatch");
  }
  ReferenceState r;
  r.theta_d = theta_d;
  r.theta_d_dot = theta_d_dot;
  r.theta_d_ddot = theta_d_ddot;
  r.e = theta - theta_d;
  r.e_dot = theta_dot - theta_d_dot;
  r.s = r.e_dot + gains.lambda.cwiseProduct(r.e);
  r.theta_r_dot = theta_d_dot - gains.lambda.cwiseProduct(r.e);
  r.theta_r_ddot = theta_d_ddot - gains.lambda.cwiseProduct(r.e_dot);
  return r;
}

Vector pd_control(const ReferenceState& ref, const Gains& gains) {
  return ref.theta_d - gains.k1 * ref.e - gains.k2 * ref.e_dot;
}

Vector sgn_smoothed(const Vector& s, double boundary_layer) {
  if (boundary_layer <= 0.0) {
    throw std::invalid_argument("sgn_smoothed: boundary layer must be positive");
  }
  return (s / boundary_layer).array().tanh();
}

Vector adaptive_control(const Matrix& y, const Vector& a_hat,
                        const ReferenceState& ref, const Gains& gains) {
  if (y.cols() != a_hat.size() || y.rows() != ref.s.size()) {
    throw std::invalid_argument("adaptive_control: regressor shape mismatch");
  }
  return y * a_hat - gains.k_s.cwiseProduct(ref.s) -
         gains.k_robust * sgn_smoothed(ref.s, gains.boundary_layer);
}

void adapt_output_layer(Vector& a_hat, const Matrix& y, const Vector& s,
                        const Matrix& p_adapt, double dt) {
  if (y.cols() != a_hat.size() || y.rows() != s.size() ||
      p_adapt.rows() != a_hat.size() || p_adapt.cols() != a_hat.size()) {
    throw std::invalid_argument("adapt_output_layer: shape mismatch");
  }
  a_hat -= dt * (p_adapt * (y.transpose() * s));
}

double lyapunov_value(const RobotModel& model, const Vector& theta,
                      const Vector& s, const Vector& a_tilde,
                      const Matrix& p_adapt) {
  const double v_track = 0.5 * s.dot(mass_matrix(model, theta) * s);
  Eigen::LLT<Matrix> llt(p_adapt);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("lyapunov_value: p_adapt not positive definite");
  }
  const double v_param =
      0.5 * model.joint_stiffness * a_tilde.dot(llt.solve(a_tilde));
  return v_track + v_param;
}

} // namespace flexnac
