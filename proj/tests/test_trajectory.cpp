#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "flexnac/dynamics.hpp"
#include "flexnac/rng.hpp"
#include "flexnac/spline.hpp"
#include "flexnac/trajectory.hpp"

using namespace flexnac;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SinusoidSpec two_joint_sine() {
  SinusoidSpec s;
  s.amplitude = (Vector(2) << 0.5, 0.4).finished();
  s.frequency_hz = (Vector(2) << 0.3, 0.45).finished();
  s.phase = (Vector(2) << 0.0, 0.25 * std::numbers::pi).finished();
  return s;
}

} // namespace

TEST_CASE("eval_sinusoid derivatives agree with finite differences") {
  const SinusoidSpec spec = two_joint_sine();
  Vector p, v, a, pp, pm, vp, vm;
  const double t = 0.7, h = 1e-6;
  eval_sinusoid(spec, t + h, pp, vp, a);
  eval_sinusoid(spec, t - h, pm, vm, a);
  eval_sinusoid(spec, t, p, v, a);

  CHECK(p[0] == doctest::Approx(0.5 * std::sin(kTwoPi * 0.3 * t)).epsilon(1e-12));
  for (Index j = 0; j < 2; ++j) {
    CHECK(v[j] == doctest::Approx((pp[j] - pm[j]) / (2.0 * h)).epsilon(1e-7));
    CHECK(a[j] == doctest::Approx((vp[j] - vm[j]) / (2.0 * h)).epsilon(1e-7));
  }

  SinusoidSpec bad = spec;
  bad.phase = Vector::Zero(1);
  CHECK_THROWS_AS(eval_sinusoid(bad, 0.0, p, v, a), std::invalid_argument);
}

TEST_CASE("gen_multisine matches its documented closed form") {
  MultisineSpec spec;
  spec.base_frequency = 0.1;
  spec.harmonics = 5;
  spec.amplitude = (Vector(2) << 0.7, 0.3).finished();
  spec.duration = 10.0;
  spec.sample_rate = 10.0;
  const Trajectory traj = gen_multisine(spec);
  REQUIRE(traj.position.rows() == 100);
  REQUIRE(traj.position.cols() == 2);
  CHECK(traj.dt == doctest::Approx(0.1));

  for (Index j = 0; j < 2; ++j) {
    Vector raw(100), raw_v(100), raw_a(100);
    for (Index i = 0; i < 100; ++i) {
      const double t = 0.1 * static_cast<double>(i);
      double p = 0.0, v = 0.0, a = 0.0;
      for (Index k = 1; k <= 5; ++k) {
        const double w = kTwoPi * static_cast<double>(k) * 0.1;
        const double phase =
            -std::numbers::pi * static_cast<double>(k * (k - 1)) / 5.0 +
            kTwoPi * static_cast<double>(j) * static_cast<double>(k) / 2.0;
        p += std::cos(w * t + phase);
        v -= w * std::sin(w * t + phase);
        a -= w * w * std::cos(w * t + phase);
      }
      raw[i] = p;
      raw_v[i] = v;
      raw_a[i] = a;
    }
    const double scale = spec.amplitude[j] / raw.cwiseAbs().maxCoeff();
    CHECK((traj.position.col(j) - scale * raw).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((traj.velocity.col(j) - scale * raw_v).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((traj.acceleration.col(j) - scale * raw_a).cwiseAbs().maxCoeff() <
          1e-12);
    // Peak normalization is exact.
    CHECK(traj.position.col(j).cwiseAbs().maxCoeff() ==
          doctest::Approx(spec.amplitude[j]).epsilon(1e-14));
  }
}

TEST_CASE("Schroeder phasing keeps the crest factor low") {
  MultisineSpec spec;
  spec.amplitude = Vector::Constant(1, 1.0);
  const Trajectory traj = gen_multisine(spec); // defaults: 48 harmonics, 60 s
  const Index m = traj.position.rows();
  const double rms = std::sqrt(traj.position.col(0).squaredNorm() /
                               static_cast<double>(m));
  const double crest = 1.0 / rms; // peak is normalized to 1

  // Zero-phase reference sum at the same sampling.
  Vector zero_phase(m);
  for (Index i = 0; i < m; ++i) {
    const double t = traj.dt * static_cast<double>(i);
    double p = 0.0;
    for (Index k = 1; k <= 48; ++k) {
      p += std::cos(kTwoPi * static_cast<double>(k) * t / 60.0);
    }
    zero_phase[i] = p;
  }
  const double crest_zero =
      zero_phase.cwiseAbs().maxCoeff() /
      std::sqrt(zero_phase.squaredNorm() / static_cast<double>(m));

  CHECK(crest < 3.0);
  CHECK(crest < 0.4 * crest_zero);
}

TEST_CASE("gen_multisine rejects sub-Nyquist sampling") {
  MultisineSpec spec;
  spec.amplitude = Vector::Constant(1, 0.5);
  spec.base_frequency = 1.0 / 60.0;
  spec.harmonics = 48;
  spec.sample_rate = 1.5; // top harmonic is 0.8 Hz, needs > 1.6 Hz
  CHECK_THROWS_AS((void)gen_multisine(spec), std::invalid_argument);
  spec.sample_rate = 100.0;
  spec.amplitude = Vector(0);
  CHECK_THROWS_AS((void)gen_multisine(spec), std::invalid_argument);
}

TEST_CASE("spline_derivative is exact for cubics including endpoints") {
  const double dt = 0.1;
  Vector y(10);
  for (Index i = 0; i < 10; ++i) {
    const double t = dt * static_cast<double>(i);
    y[i] = 2.0 * t * t * t - 3.0 * t * t + 0.5 * t - 1.0;
  }
  const Vector d = spline_derivative(y, dt);
  for (Index i = 0; i < 10; ++i) {
    const double t = dt * static_cast<double>(i);
    CHECK(d[i] == doctest::Approx(6.0 * t * t - 6.0 * t + 0.5).epsilon(1e-10));
  }
}

TEST_CASE("spline_derivative recovers a sine derivative to 1e-6") {
  const double dt = 1e-3;
  const Index m = 1001;
  Vector y(m);
  for (Index i = 0; i < m; ++i) y[i] = std::sin(kTwoPi * dt * static_cast<double>(i));
  const Vector d = spline_derivative(y, dt);
  double worst = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double exact = kTwoPi * std::cos(kTwoPi * dt * static_cast<double>(i));
    worst = std::max(worst, std::abs(d[i] - exact));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("spline_derivative_columns matches per-column calls bitwise") {
  Rng rng(51);
  Matrix y(64, 3);
  for (Index r = 0; r < 64; ++r)
    for (Index c = 0; c < 3; ++c) y(r, c) = rng.uniform(-1.0, 1.0);
  const Matrix d = spline_derivative_columns(y, 0.01);
  for (Index c = 0; c < 3; ++c) {
    const Vector col = spline_derivative(y.col(c), 0.01);
    CHECK((d.col(c).array() == col.array()).all());
  }
  const Vector tiny = Vector::Zero(3);
  CHECK_THROWS_AS((void)spline_derivative(tiny, 0.01), std::invalid_argument);
  const Vector ok = Vector::Zero(8);
  CHECK_THROWS_AS((void)spline_derivative(ok, 0.0), std::invalid_argument);
}

TEST_CASE("gen_sinusoid_family respects ranges, limits and the seed") {
  SinusoidFamilySpec spec;
  spec.count = 30;
  spec.samples = 400;
  spec.min_amplitude = 0.15;
  spec.max_amplitude = 2.0;
  spec.position_limit = 0.8;

  Rng rng_a(7), rng_b(7), rng_c(8);
  const auto fam_a = gen_sinusoid_family(spec, 2, rng_a);
  const auto fam_b = gen_sinusoid_family(spec, 2, rng_b);
  const auto fam_c = gen_sinusoid_family(spec, 2, rng_c);
  REQUIRE(fam_a.size() == 30);

  double max_peak = 0.0;
  bool any_differs_from_c = false;
  for (std::size_t i = 0; i < fam_a.size(); ++i) {
    const Trajectory& tr = fam_a[i];
    REQUIRE(tr.position.rows() == 400);
    REQUIRE(tr.position.cols() == 2);
    CHECK(tr.dt == doctest::Approx(0.01));
    max_peak = std::max(max_peak, tr.position.cwiseAbs().maxCoeff());
    CHECK((tr.position.array() == fam_b[i].position.array()).all());
    CHECK((tr.velocity.array() == fam_b[i].velocity.array()).all());
    any_differs_from_c = any_differs_from_c ||
                         !(tr.position.array() == fam_c[i].position.array()).all();

    // Velocity columns are consistent with position finite differences.
    double fd_err = 0.0;
    for (Index r = 1; r + 1 < 400; ++r) {
      const Vector fd =
          (tr.position.row(r + 1) - tr.position.row(r - 1)).transpose() / 0.02;
      fd_err = std::max(fd_err, (fd - tr.velocity.row(r).transpose()).cwiseAbs().maxCoeff());
    }
    CHECK(fd_err < 1e-3 * std::max(1.0, tr.velocity.cwiseAbs().maxCoeff()));
  }
  CHECK(max_peak <= 0.8 + 1e-12);
  CHECK(max_peak > 0.75); // at least one amplitude hit the clamp
  CHECK(any_differs_from_c);
}

TEST_CASE("collect_dataset pairs are consistent with the reduced dynamics") {
  const FrictionModel fr{FrictionKind::ViscousCoulomb, 0.4, 0.0, 0.0, 0.1};
  const RobotModel model = make_pendulum(1.0, 1.0, 9.81, 50.0, 0.01, fr);
  Gains gains = make_gains(1, kPendulumBasisDim, 2.0, 0.5, 0.0, 0.02, 0.05);
  gains.k1 = 0.2;
  gains.k2 = 0.1;

  SinusoidFamilySpec spec;
  spec.count = 3;
  spec.samples = 800;
  Rng rng(52);
  const auto family = gen_sinusoid_family(spec, 1, rng);
  const TrainBatch batch = collect_dataset(model, family, gains, {});
  REQUIRE(batch.inputs.rows() == 2400);
  REQUIRE(batch.inputs.cols() == 4);
  REQUIRE(batch.targets.cols() == 1);

  // Exact identity: rebuilding the state from each row and computing the
  // instantaneous acceleration under the logged command must reproduce that
  // command through the analytic regressor, Y(x)·a = θ_m.
  double worst_exact = 0.0, worst_spline = 0.0;
  const Vector a_true =
      analytic_regressor(model, Vector::Zero(1), Vector::Zero(1),
                         Vector::Zero(1), Vector::Zero(1))
          .a;
  for (Index r = 0; r < batch.inputs.rows(); ++r) {
    const Vector qd1 = batch.inputs.row(r).segment(0, 1).transpose();
    const Vector q = batch.inputs.row(r).segment(1, 1).transpose();
    const Vector qd2 = batch.inputs.row(r).segment(2, 1).transpose();
    const Vector qdd_spline = batch.inputs.row(r).segment(3, 1).transpose();
    CHECK(qd1[0] == qd2[0]);

    RobotState state = make_rest_state(model, q);
    state.theta_dot = qd1;
    const Vector theta_m = batch.targets.row(r).transpose();
    const Vector qdd = link_accel_reduced(model, state, theta_m);

    const Matrix y_exact = analytic_regressor(model, qd1, q, qd2, qdd).Y;
    worst_exact = std::max(
        worst_exact, std::abs((y_exact * a_true)[0] - theta_m[0]));

    const Matrix y_spl = analytic_regressor(model, qd1, q, qd2, qdd_spline).Y;
    worst_spline = std::max(
        worst_spline, std::abs((y_spl * a_true)[0] - theta_m[0]));
  }
  CHECK(worst_exact < 1e-10);
  // The command is zero-order-held, so the true acceleration jumps by
  // (k_p/m_eff)·Δθ_m at every tick and the spline smooths across the jump.
  // The resulting prediction floor is half the per-tick command increment.
  double max_cmd_step = 0.0;
  for (Index r = 1; r < batch.targets.rows(); ++r) {
    if (r % 800 == 0) continue; // trajectory boundary
    max_cmd_step = std::max(
        max_cmd_step, std::abs(batch.targets(r, 0) - batch.targets(r - 1, 0)));
  }
  CHECK(worst_spline < 0.75 * max_cmd_step + 1e-3);
  CHECK(worst_spline < 2e-2);
}

TEST_CASE("collect_dataset validates shapes and step divisibility") {
  const RobotModel model = make_pendulum(1.0, 1.0);
  const Gains gains = make_gains(1, kPendulumBasisDim, 2.0, 0.5, 0.0, 0.02, 0.05);

  SinusoidFamilySpec spec;
  spec.count = 1;
  spec.samples = 50;
  Rng rng(53);
  auto family = gen_sinusoid_family(spec, 1, rng);

  CollectOptions bad;
  bad.inner_dt = 3e-3; // 0.01 / 0.003 is not an integer
  CHECK_THROWS_AS((void)collect_dataset(model, family, gains, bad),
                  std::invalid_argument);

  auto wrong = gen_sinusoid_family(spec, 2, rng); // 2 columns, 1-joint model
  CHECK_THROWS_AS((void)collect_dataset(model, wrong, gains, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)collect_dataset(model, {}, gains, {}),
                  std::invalid_argument);
}
