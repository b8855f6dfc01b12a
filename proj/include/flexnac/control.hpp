#pragma once

#include "flexnac/robot.hpp"
#include "flexnac/types.hpp"

namespace flexnac {

/// Controller gains. lambda and k_s are the diagonals of Λ and K_s, p_adapt
/// is the adaptation gain P (basis_dim × basis_dim, SPD). k1/k2 drive the
/// PD baseline.
struct Gains {
  Vector lambda;
  Vector k_s;
  double k_robust = 0.0;
  double boundary_layer = 0.01;
  double k1 = 0.2;
  double k2 = 0.1;
  Matrix p_adapt;

  void validate(Index n_joints) const;
};

/// Uniform gains: Λ = λ·I, K_s = k_s·I, P = p·I.
Gains make_gains(Index n_joints, Index basis_dim, double lambda, double k_s,
                 double k_robust, double boundary_layer, double p_adapt);

/// Desired trajectory sample plus the derived error and sliding signals:
///   e = θ - θ_d,  s = ė + Λe,  θ̇_r = θ̇_d - Λe,  θ̈_r = θ̈_d - Λė.
struct ReferenceState {
  Vector theta_d, theta_d_dot, theta_d_ddot;
  Vector e, e_dot, s;
  Vector theta_r_dot, theta_r_ddot;
};

ReferenceState reference_signals(const Vector& theta, const Vector& theta_dot,
                                 const Vector& theta_d,
                                 const Vector& theta_d_dot,
                                 const Vector& theta_d_ddot,
                                 const Gains& gains);

/// PD baseline motor command θ_m = θ_d - k1·e - k2·ė.
Vector pd_control(const ReferenceState& ref, const Gains& gains);

/// Boundary-layer smoothed sign, tanh(s/φ) elementwise. φ must be positive.
Vector sgn_smoothed(const Vector& s, double boundary_layer);

/// Sliding-mode motor command θ_m = Y·â - K_s·s - k·tanh(s/φ). Y is the
/// regressor evaluated at (θ̇_r, θ, θ̇, θ̈_r), from the network or the
/// analytic pendulum basis.
Vector adaptive_control(const Matrix& y, const Vector& a_hat,
                        const ReferenceState& ref, const Gains& gains);

/// Fast-timescale parameter update, explicit Euler on â̇ = -P·Yᵀ·s:
///   â ← â - dt·P·Yᵀ·s.
void adapt_output_layer(Vector& a_hat, const Matrix& y, const Vector& s,
                        const Matrix& p_adapt, double dt);

/// Lyapunov function V = ½·sᵀM(θ)s + ½·k_p·ãᵀP⁻¹ã with ã = â - a.
double lyapunov_value(const RobotModel& model, const Vector& theta,
                      const Vector& s, const Vector& a_tilde,
                      const Matrix& p_adapt);

} // namespace flexnac
