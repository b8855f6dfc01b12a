#include "flexnac/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "flexnac/dynamics.hpp"
#include "flexnac/spline.hpp"

namespace flexnac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

void eval_sinusoid(const SinusoidSpec& spec, double t, Vector& position,
                   Vector& velocity, Vector& acceleration) {
  const Index n = spec.amplitude.size();
  if (spec.frequency_hz.size() != n || spec.phase.size() != n) {
    throw std::invalid_argument("eval_sinusoid: spec size mismatch");
  }
  position.resize(n);
  velocity.resize(n);
  acceleration.resize(n);
  for (Index j = 0; j < n; ++j) {
    const double w = kTwoPi * spec.frequency_hz[j];
    const double arg = w * t + spec.phase[j];
    position[j] = spec.amplitude[j] * std::sin(arg);
    velocity[j] = spec.amplitude[j] * w * std::cos(arg);
    acceleration[j] = -spec.amplitude[j] * w * w * std::sin(arg);
  }
}

Trajectory gen_multisine(const MultisineSpec& spec) {
  const Index n = spec.amplitude.size();
  if (n < 1) throw std::invalid_argument("gen_multisine: no joints");
  if (spec.harmonics < 1 || spec.base_frequency <= 0.0 ||
      spec.duration <= 0.0 || spec.sample_rate <= 0.0) {
    throw std::invalid_argument("gen_multisine: invalid spec");
  }
  const double top = static_cast<double>(spec.harmonics) * spec.base_frequency;
  if (spec.sample_rate <= 2.0 * top) {
    throw std::invalid_argument(
        "gen_multisine: sample rate below Nyquist for top harmonic");
  }
  const auto samples =
      static_cast<Index>(std::llround(spec.duration * spec.sample_rate));
  if (samples < 4) throw std::invalid_argument("gen_multisine: too short");
  const double dt = 1.0 / spec.sample_rate;

  Trajectory traj;
  traj.dt = dt;
  traj.position.resize(samples, n);
  traj.velocity.resize(samples, n);
  traj.acceleration.resize(samples, n);

  const auto h = static_cast<double>(spec.harmonics);
  for (Index j = 0; j < n; ++j) {
    const double rot = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    for (Index i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) * dt;
      double p = 0.0, v = 0.0, a = 0.0;
      for (Index k = 1; k <= spec.harmonics; ++k) {
        const double kd = static_cast<double>(k);
        const double w = kTwoPi * kd * spec.base_frequency;
        const double phase =
            -std::numbers::pi * kd * (kd - 1.0) / h + rot * kd;
        const double arg = w * t + phase;
        p += std::cos(arg);
        v -= w * std::sin(arg);
        a -= w * w * std::cos(arg);
      }
      traj.position(i, j) = p;
      traj.velocity(i, j) = v;
      traj.acceleration(i, j) = a;
    }
    const double peak = traj.position.col(j).cwiseAbs().maxCoeff();
    const double scale = spec.amplitude[j] / peak;
    traj.position.col(j) *= scale;
    traj.velocity.col(j) *= scale;
    traj.acceleration.col(j) *= scale;
  }
  return traj;
}

std::vector<Trajectory> gen_sinusoid_family(const SinusoidFamilySpec& spec,
                                            Index n_joints, Rng& rng) {
  if (n_joints < 1) throw std::invalid_argument("gen_sinusoid_family: no joints");
  if (spec.count < 1 || spec.samples < 4 || spec.sample_rate <= 0.0) {
    throw std::invalid_argument("gen_sinusoid_family: invalid spec");
  }
  const double dt = 1.0 / spec.sample_rate;
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (Index c = 0; c < spec.count; ++c) {
    SinusoidSpec sine;
    sine.amplitude.resize(n_joints);
    sine.frequency_hz.resize(n_joints);
    sine.phase.resize(n_joints);
    for (Index j = 0; j < n_joints; ++j) {
      sine.amplitude[j] = std::min(
          rng.uniform(spec.min_amplitude, spec.max_amplitude),
          spec.position_limit);
      sine.frequency_hz[j] =
          rng.uniform(spec.min_frequency_hz, spec.max_frequency_hz);
      sine.phase[j] = rng.uniform(0.0, kTwoPi);
    }
    Trajectory traj;
    traj.dt = dt;
    traj.position.resize(spec.samples, n_joints);
    traj.velocity.resize(spec.samples, n_joints);
    traj.acceleration.resize(spec.samples, n_joints);
    Vector p, v, a;
    for (Index i = 0; i < spec.samples; ++i) {
      eval_sinusoid(sine, static_cast<double>(i) * dt, p, v, a);
      traj.position.row(i) = p.transpose();
      traj.velocity.row(i) = v.transpose();
      traj.acceleration.row(i) = a.transpose();
    }
    out.push_back(std::move(traj));
  }
  return out;
}

TrainBatch collect_dataset(const RobotModel& model,
                           const std::vector<Trajectory>& trajectories,
                           const Gains& gains, const CollectOptions& options) {
  model.validate();
  gains.validate(model.n_joints);
  if (trajectories.empty()) {
    throw std::invalid_argument("collect_dataset: no trajectories");
  }
  if (options.inner_dt <= 0.0) {
    throw std::invalid_argument("collect_dataset: inner_dt must be positive");
  }
  const Index n = model.n_joints;

  Index total = 0;
  for (const auto& traj : trajectories) total += traj.position.rows();
  TrainBatch data;
  data.inputs.resize(total, 4 * n);
  data.targets.resize(total, n);

  Index row = 0;
  for (const auto& traj : trajectories) {
    const Index samples = traj.position.rows();
    if (traj.position.cols() != n || samples < 4) {
      throw std::invalid_argument("collect_dataset: trajectory shape mismatch");
    }
    const double control_dt = traj.dt;
    const auto substeps =
        static_cast<Index>(std::llround(control_dt / options.inner_dt));
    if (substeps < 1 ||
        std::abs(control_dt - static_cast<double>(substeps) * options.inner_dt) >
            1e-12) {
      throw std::invalid_argument(
          "collect_dataset: control period not a multiple of inner_dt");
    }

    Matrix theta_log(samples, n);
    Matrix theta_dot_log(samples, n);
    Matrix theta_m_log(samples, n);

    RobotState state = make_rest_state(model, traj.position.row(0).transpose());
    for (Index i = 0; i < samples; ++i) {
      const ReferenceState ref = reference_signals(
          state.theta, state.theta_dot, traj.position.row(i).transpose(),
          traj.velocity.row(i).transpose(), traj.acceleration.row(i).transpose(),
          gains);
      const Vector theta_m = pd_control(ref, gains);
      theta_log.row(i) = state.theta.transpose();
      theta_dot_log.row(i) = state.theta_dot.transpose();
      theta_m_log.row(i) = theta_m.transpose();
      for (Index k = 0; k < substeps; ++k) {
        state = step_rk4(model, state, theta_m, options.inner_dt,
                         SimMode::Reduced);
      }
    }

    const Matrix theta_ddot = spline_derivative_columns(theta_dot_log, control_dt);
    for (Index i = 0; i < samples; ++i) {
      data.inputs.row(row) << theta_dot_log.row(i), theta_log.row(i),
          theta_dot_log.row(i), theta_ddot.row(i);
      data.targets.row(row) = theta_m_log.row(i);
      ++row;
    }
  }
  return data;
}

} // namespace flexnac
