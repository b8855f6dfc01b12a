#include "doctest.h"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

#include "flexnac/control.hpp"
#include "flexnac/dynamics.hpp"
#include "flexnac/rng.hpp"
#include "flexnac/robot.hpp"

using namespace flexnac;

namespace {

Gains two_joint_gains() {
  Gains g;
  g.lambda = (Vector(2) << 2.0, 3.0).finished();
  g.k_s = (Vector(2) << 0.5, 0.25).finished();
  g.k_robust = 0.02;
  g.boundary_layer = 0.02;
  g.p_adapt = Matrix::Identity(3, 3);
  return g;
}

ReferenceState two_joint_reference(const Gains& g) {
  const Vector theta = (Vector(2) << 0.1, -0.2).finished();
  const Vector theta_dot = (Vector(2) << 0.3, 0.4).finished();
  const Vector theta_d = (Vector(2) << 0.0, 0.1).finished();
  const Vector theta_d_dot = (Vector(2) << 0.2, -0.1).finished();
  const Vector theta_d_ddot = (Vector(2) << 1.0, 2.0).finished();
  return reference_signals(theta, theta_dot, theta_d, theta_d_dot,
                           theta_d_ddot, g);
}

} // namespace

TEST_CASE("make_gains broadcasts scalars and validate rejects bad gains") {
  const Gains g = make_gains(2, 5, 2.0, 0.5, 0.02, 0.02, 0.05);
  CHECK(g.lambda.size() == 2);
  CHECK(g.lambda[1] == 2.0);
  CHECK(g.k_s[0] == 0.5);
  CHECK(g.p_adapt.rows() == 5);
  CHECK(g.p_adapt(3, 3) == 0.05);
  CHECK(g.p_adapt(0, 1) == 0.0);
  CHECK_NOTHROW(g.validate(2));
  CHECK_THROWS_AS(g.validate(3), std::invalid_argument);

  Gains bad = g;
  bad.lambda[0] = 0.0;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  bad = g;
  bad.boundary_layer = 0.0;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  bad = g;
  bad.p_adapt(0, 1) = 1.0; // asymmetric
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
  bad = g;
  bad.k_robust = -1.0;
  CHECK_THROWS_AS(bad.validate(2), std::invalid_argument);
}

TEST_CASE("reference_signals computes e, s and the reference derivatives") {
  const Gains g = two_joint_gains();
  const ReferenceState r = two_joint_reference(g);

  CHECK(r.e[0] == doctest::Approx(0.1));
  CHECK(r.e[1] == doctest::Approx(-0.3));
  CHECK(r.e_dot[0] == doctest::Approx(0.1));
  CHECK(r.e_dot[1] == doctest::Approx(0.5));
  // s = ė + Λe with Λ = diag(2, 3).
  CHECK(r.s[0] == doctest::Approx(0.3));
  CHECK(r.s[1] == doctest::Approx(-0.4));
  // θ̇_r = θ̇_d - Λe, θ̈_r = θ̈_d - Λė.
  CHECK(r.theta_r_dot[0] == doctest::Approx(0.0));
  CHECK(r.theta_r_dot[1] == doctest::Approx(0.8));
  CHECK(r.theta_r_ddot[0] == doctest::Approx(0.8));
  CHECK(r.theta_r_ddot[1] == doctest::Approx(0.5));
  // Identity: s = θ̇ - θ̇_r exactly.
  const Vector theta_dot = (Vector(2) << 0.3, 0.4).finished();
  CHECK((r.s - (theta_dot - r.theta_r_dot)).cwiseAbs().maxCoeff() < 1e-15);

  const Vector short_v = Vector::Zero(1);
  CHECK_THROWS_AS((void)reference_signals(short_v, theta_dot, r.theta_d,
                                          r.theta_d_dot, r.theta_d_ddot, g),
                  std::invalid_argument);
}

TEST_CASE("pd_control applies the position/velocity error gains") {
  Gains g = two_joint_gains();
  g.k1 = 0.2;
  g.k2 = 0.1;
  const ReferenceState r = two_joint_reference(g);
  const Vector u = pd_control(r, g);
  // θ_m = θ_d - k1·e - k2·ė.
  CHECK(u[0] == doctest::Approx(0.0 - 0.2 * 0.1 - 0.1 * 0.1));
  CHECK(u[1] == doctest::Approx(0.1 + 0.2 * 0.3 - 0.1 * 0.5));
}

TEST_CASE("sgn_smoothed is odd, bounded and has slope 1/phi at zero") {
  const Vector s = (Vector(5) << -3.0, -0.001, 0.0, 0.001, 3.0).finished();
  const Vector y = sgn_smoothed(s, 0.02);
  CHECK(y[2] == 0.0);
  CHECK(y[0] == doctest::Approx(-y[4]));
  CHECK(y[1] == doctest::Approx(-y[3]));
  CHECK(y.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(y[4] == doctest::Approx(std::tanh(150.0)));
  // Small argument: tanh(s/φ) ≈ s/φ.
  CHECK(y[3] == doctest::Approx(0.001 / 0.02).epsilon(1e-3));
  CHECK_THROWS_AS((void)sgn_smoothed(s, 0.0), std::invalid_argument);
}

TEST_CASE("adaptive_control combines feedforward, sliding and robust terms") {
  const Gains g = two_joint_gains();
  const ReferenceState r = two_joint_reference(g); // s = (0.3, -0.4)
  Matrix y(2, 3);
  y << 1.0, 0.5, -1.0, 0.0, 2.0, 1.0;
  const Vector a_hat = (Vector(3) << 0.1, 0.2, 0.3).finished();

  const Vector u = adaptive_control(y, a_hat, r, g);
  const double u0 = -0.1 - 0.5 * 0.3 - 0.02 * std::tanh(0.3 / 0.02);
  const double u1 = 0.7 - 0.25 * -0.4 - 0.02 * std::tanh(-0.4 / 0.02);
  CHECK(u[0] == doctest::Approx(u0).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(u1).epsilon(1e-12));

  const Matrix bad = Matrix::Zero(2, 4);
  CHECK_THROWS_AS((void)adaptive_control(bad, a_hat, r, g),
                  std::invalid_argument);
}

TEST_CASE("adapt_output_layer is one explicit Euler step of -P·Yᵀ·s") {
  Matrix y(2, 3);
  y << 1.0, 0.5, -1.0, 0.0, 2.0, 1.0;
  const Vector s = (Vector(2) << 1.0, -1.0).finished();
  const Matrix p = (Vector(3) << 2.0, 1.0, 0.5).finished().asDiagonal();
  Vector a_hat = (Vector(3) << 0.1, 0.2, 0.3).finished();

  adapt_output_layer(a_hat, y, s, p, 0.1);
  // Yᵀs = (1, -1.5, -2), Δ = -0.1·P·Yᵀs = (-0.2, 0.15, 0.1).
  CHECK(a_hat[0] == doctest::Approx(-0.1).epsilon(1e-14));
  CHECK(a_hat[1] == doctest::Approx(0.35).epsilon(1e-14));
  CHECK(a_hat[2] == doctest::Approx(0.4).epsilon(1e-14));

  Vector wrong = Vector::Zero(4);
  CHECK_THROWS_AS(adapt_output_layer(wrong, y, s, p, 0.1),
                  std::invalid_argument);
}

TEST_CASE("lyapunov_value matches the closed form") {
  // Point-mass pendulum: M = m·l² = 1 exactly.
  const RobotModel model = make_pendulum(1.0, 1.0);
  const Vector theta = Vector::Constant(1, 0.4);
  const Vector s = Vector::Constant(1, 0.2);
  const Vector a_tilde =
      (Vector(5) << 0.1, -0.2, 0.3, 0.0, 0.05).finished();
  const Matrix p = 0.05 * Matrix::Identity(5, 5);
  // ãᵀP⁻¹ã = 20 · 0.1425 = 2.85; V = 0.5·0.04 + 0.5·50·2.85.
  CHECK(lyapunov_value(model, theta, s, a_tilde, p) ==
        doctest::Approx(0.02 + 71.25).epsilon(1e-12));

  // Random SPD P on a two-link model, against an explicit inverse.
  Rng rng(41);
  const Vector masses = (Vector(2) << 1.5, 1.0).finished();
  const Vector lengths = (Vector(2) << 0.5, 0.4).finished();
  const RobotModel arm = make_two_link_arm(masses, lengths);
  const Vector th2 = rng.uniform_vector(2, -1.0, 1.0);
  const Vector s2 = rng.uniform_vector(2, -1.0, 1.0);
  const Vector at = rng.uniform_vector(4, -1.0, 1.0);
  Matrix a(4, 4);
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) a(r, c) = rng.uniform(-1.0, 1.0);
  const Matrix spd = a * a.transpose() + Matrix::Identity(4, 4);
  const double expected =
      0.5 * s2.dot(mass_matrix(arm, th2) * s2) +
      0.5 * arm.joint_stiffness * at.dot(spd.inverse() * at);
  CHECK(lyapunov_value(arm, th2, s2, at, spd) ==
        doctest::Approx(expected).epsilon(1e-10));

  const Matrix not_pd = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS((void)lyapunov_value(arm, th2, s2, s2, not_pd),
                  std::invalid_argument);
}

TEST_CASE("PD setpoint regulation settles at the analytic equilibrium") {
  // Pure viscous friction so the rest point solves
  //   k_p·(θ_d - k1·(θ - θ_d)) = g_eff·sin(θ) + k_p·θ,
  // found independently by Newton's method.
  const FrictionModel fr{FrictionKind::ViscousCoulomb, 1.0, 0.0, 0.0, 0.1};
  const RobotModel model = make_pendulum(1.0, 1.0, 9.81, 50.0, 0.01, fr);
  const double g_eff = 9.81;
  const double kp = model.joint_stiffness;

  Gains gains = make_gains(1, kPendulumBasisDim, 2.0, 0.5, 0.0, 0.02, 0.05);
  gains.k1 = 0.2;
  gains.k2 = 0.1;
  const double theta_d = 0.3;

  double root = theta_d;
  for (int it = 0; it < 50; ++it) {
    const double f =
        kp * theta_d - kp * gains.k1 * (root - theta_d) - g_eff * std::sin(root) - kp * root;
    const double fp = -kp * gains.k1 - g_eff * std::cos(root) - kp;
    root -= f / fp;
  }

  const Vector zero = Vector::Zero(1);
  RobotState state = make_rest_state(model, zero);
  const Vector theta_d_v = Vector::Constant(1, theta_d);
  for (int tick = 0; tick < 6000; ++tick) { // 60 s at 100 Hz
    const ReferenceState ref = reference_signals(
        state.theta, state.theta_dot, theta_d_v, zero, zero, gains);
    const Vector cmd = pd_control(ref, gains);
    for (int sub = 0; sub < 10; ++sub) {
      state = step_rk4(model, state, cmd, 1e-3, SimMode::Reduced);
    }
  }
  CHECK(std::abs(state.theta[0] - root) < 1e-6);
  CHECK(std::abs(state.theta_dot[0]) < 1e-6);
  // The gravity droop is real: the equilibrium is well below the setpoint.
  CHECK(root < theta_d - 0.02);
}

TEST_CASE("exact-parameter feedforward keeps the tracking error small") {
  const FrictionModel fr{FrictionKind::ViscousCoulomb, 0.05, 0.1, 0.0, 0.1};
  const RobotModel model = make_pendulum(1.0, 1.0, 9.81, 50.0, 0.01, fr);
  const Gains gains = make_gains(1, kPendulumBasisDim, 2.0, 0.5, 0.02, 0.02, 0.05);

  const double amp = 0.5, omega = 2.0 * M_PI * 0.5;
  const Vector start = Vector::Zero(1);
  RobotState state = make_rest_state(model, start);
  state.theta_dot[0] = amp * omega; // start on the trajectory

  const Vector probe = Vector::Zero(1);
  const Vector a_true =
      analytic_regressor(model, probe, probe, probe, probe).a;

  double max_err = 0.0;
  for (int tick = 0; tick < 200; ++tick) { // 2 s at 100 Hz
    const double t = 0.01 * tick;
    const Vector theta_d = Vector::Constant(1, amp * std::sin(omega * t));
    const Vector theta_d_dot =
        Vector::Constant(1, amp * omega * std::cos(omega * t));
    const Vector theta_d_ddot =
        Vector::Constant(1, -amp * omega * omega * std::sin(omega * t));
    const ReferenceState ref = reference_signals(
        state.theta, state.theta_dot, theta_d, theta_d_dot, theta_d_ddot, gains);
    const Matrix y = analytic_regressor(model, ref.theta_r_dot, state.theta,
                                        state.theta_dot, ref.theta_r_ddot)
                         .Y;
    const Vector cmd = adaptive_control(y, a_true, ref, gains);
    for (int sub = 0; sub < 10; ++sub) {
      state = step_rk4(model, state, cmd, 1e-3, SimMode::Reduced);
    }
    max_err = std::max(max_err, std::abs(state.theta[0] - amp * std::sin(omega * (t + 0.01))));
  }
  CHECK(max_err < 5e-3);
}
