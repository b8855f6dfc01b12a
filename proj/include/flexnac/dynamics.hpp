#pragma once

#include <functional>
#include <utility>

#include "flexnac/robot.hpp"
#include "flexnac/types.hpp"

namespace flexnac {

/// Inertia matrix M(θ), symmetric positive definite. The payload mass
/// contributes to the distal link's effective parameters.
Matrix mass_matrix(const RobotModel& model, const Vector& theta);

/// Coriolis/centrifugal matrix C(θ, θ̇) built from Christoffel symbols of
/// the exact ∂M/∂θ, so that Ṁ - 2C is skew-symmetric.
Matrix coriolis_matrix(const RobotModel& model, const Vector& theta,
                       const Vector& theta_dot);

/// Gravitational torque G(θ) = ∂V/∂θ. Callers form H(θ) = G(θ) + k_p·θ.
Vector gravity_torque(const RobotModel& model, const Vector& theta);

/// Per-joint friction torques f(θ̇).
Vector friction_torque(const RobotModel& model, const Vector& theta_dot);

double kinetic_energy(const RobotModel& model, const Vector& theta,
                      const Vector& theta_dot);

/// Gravitational potential, zero with all links hanging straight down.
double potential_energy(const RobotModel& model, const Vector& theta);

/// Link acceleration of the reduced model
///   M(θ)θ̈ + C(θ,θ̇)θ̇ + H(θ) = k_p·θ_m - f(θ̇),  H(θ) = G(θ) + k_p·θ.
Vector link_accel_reduced(const RobotModel& model, const RobotState& state,
                          const Vector& theta_m_cmd);

/// Link and motor accelerations of the full two-mass model
///   M(θ)θ̈ + C(θ,θ̇)θ̇ + G(θ) + f(θ̇) + K(θ - θ_m) = 0
///   J_m·θ̈_m + K(θ_m - θ) = τ,   K = k_p·I.
std::pair<Vector, Vector> full_accel(const RobotModel& model,
                                     const RobotState& state,
                                     const Vector& tau);

enum class SimMode { Reduced, Full };

/// Control input evaluated at an integration stage: θ_m command in Reduced
/// mode, motor torque τ in Full mode.
using InputFn = std::function<Vector(double time, const RobotState&)>;

/// One classical RK4 step with zero-order-hold input. Throws
/// std::runtime_error if the state goes non-finite (instability).
RobotState step_rk4(const RobotModel& model, const RobotState& state,
                    const Vector& input, double dt, SimMode mode);

/// One classical RK4 step with the input re-evaluated at every stage.
RobotState step_rk4(const RobotModel& model, const RobotState& state,
                    const InputFn& input, double dt, SimMode mode);

/// Exact regressor and true parameter vector of the single pendulum with
/// viscous+Coulomb friction (verification oracle):
///   Y = [θ̈, sin θ, θ, θ̇₁, sgn(θ̇₁)],  a = k_p⁻¹·[m_eff, g_eff, k_p, b, c]
/// so that Y·a = k_p⁻¹(M·θ̈ + C(θ,θ̇₂)·θ̇₁ + H(θ) + f(θ̇₁)).
struct PendulumRegressor {
  Matrix Y; ///< 1×5
  Vector a; ///< 5
};

PendulumRegressor analytic_regressor(const RobotModel& model,
                                     const Vector& theta_dot_1,
                                     const Vector& theta,
                                     const Vector& theta_dot_2,
                                     const Vector& theta_ddot);

/// Basis dimension of the analytic pendulum regressor.
inline constexpr Index kPendulumBasisDim = 5;

} // namespace flexnac
