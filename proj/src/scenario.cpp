#include "flexnac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flexnac/dynamics.hpp"
#include "flexnac/spline.hpp"

namespace flexnac {

DataBuffer::DataBuffer(Index capacity, Index n_joints)
    : capacity_(capacity) {
  if (capacity < 4 || n_joints < 1) {
    throw std::invalid_argument("DataBuffer: capacity >= 4 and joints >= 1");
  }
  theta_.resize(capacity, n_joints);
  theta_dot_.resize(capacity, n_joints);
  theta_m_.resize(capacity, n_joints);
}

void DataBuffer::push(const Vector& theta, const Vector& theta_dot,
                      const Vector& theta_m) {
  if (theta.size() != theta_.cols() || theta_dot.size() != theta_.cols() ||
      theta_m.size() != theta_.cols()) {
    throw std::invalid_argument("DataBuffer: sample size mismatch");
  }
  theta_.row(head_) = theta.transpose();
  theta_dot_.row(head_) = theta_dot.transpose();
  theta_m_.row(head_) = theta_m.transpose();
  head_ = (head_ + 1) % capacity_;
  if (count_ < capacity_) ++count_;
}

TrainBatch DataBuffer::training_pairs(double dt) const {
  if (count_ < 4) {
    throw std::runtime_error("DataBuffer: need at least 4 samples");
  }
  const Index n = theta_.cols();
  Matrix th(count_, n), thd(count_, n), thm(count_, n);
  const Index oldest = count_ < capacity_ ? 0 : head_;
  for (Index i = 0; i < count_; ++i) {
    const Index src = (oldest + i) % capacity_;
    th.row(i) = theta_.row(src);
    thd.row(i) = theta_dot_.row(src);
    thm.row(i) = theta_m_.row(src);
  }
  const Matrix thdd = spline_derivative_columns(thd, dt);
  TrainBatch batch;
  batch.inputs.resize(count_, 4 * n);
  for (Index i = 0; i < count_; ++i) {
    batch.inputs.row(i) << thd.row(i), th.row(i), thd.row(i), thdd.row(i);
  }
  batch.targets = std::move(thm);
  return batch;
}

Index SimLog::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    throw std::invalid_argument("SimLog: no column named " + name);
  }
  return static_cast<Index>(it - columns.begin());
}

namespace {

std::vector<std::string> log_columns(Index n, bool with_lyapunov) {
  std::vector<std::string> cols;
  cols.emplace_back("time");
  auto per_joint = [&](const char* base) {
    for (Index j = 0; j < n; ++j) {
      cols.push_back(std::string(base) + "_" + std::to_string(j));
    }
  };
  per_joint("theta");
  per_joint("theta_d");
  per_joint("e");
  per_joint("s");
  per_joint("theta_m");
  cols.emplace_back("norm_a_hat");
  cols.emplace_back("net_version");
  if (with_lyapunov) cols.emplace_back("v_lyap");
  return cols;
}

} // namespace

ScenarioResult run_scenario(const RobotModel& model, const Scenario& scenario,
                            const Gains& gains, RegressorNet* net, Rng& rng) {
  model.validate();
  gains.validate(model.n_joints);
  RobotModel m = model; // events mutate the working copy
  const Index n = m.n_joints;

  if (scenario.duration <= 0.0 || scenario.control_rate <= 0.0) {
    throw std::invalid_argument("run_scenario: invalid duration or rate");
  }
  const double control_dt = 1.0 / scenario.control_rate;
  const auto substeps =
      static_cast<Index>(std::llround(control_dt / scenario.inner_dt));
  if (substeps < 1 ||
      std::abs(control_dt - static_cast<double>(substeps) * scenario.inner_dt) >
          1e-12) {
    throw std::invalid_argument(
        "run_scenario: control period not a multiple of inner_dt");
  }
  const auto ticks =
      static_cast<Index>(std::llround(scenario.duration * scenario.control_rate));

  const bool adaptive = scenario.controller == ControllerKind::Adaptive;
  const bool use_net = scenario.regressor == RegressorKind::Network;
  if (adaptive && use_net) {
    if (!net) throw std::invalid_argument("run_scenario: network required");
    if (net->n_joints != n || net->input_dim != 4 * n) {
      throw std::invalid_argument("run_scenario: network shape mismatch");
    }
  }
  if (scenario.log_lyapunov && !(adaptive && !use_net)) {
    throw std::invalid_argument(
        "run_scenario: Lyapunov logging needs the analytic regressor");
  }

  Vector a_hat_analytic;
  if (adaptive && !use_net) {
    a_hat_analytic = scenario.initial_a_hat.size() > 0
                         ? scenario.initial_a_hat
                         : Vector::Zero(kPendulumBasisDim);
    if (a_hat_analytic.size() != kPendulumBasisDim) {
      throw std::invalid_argument("run_scenario: initial_a_hat size");
    }
  }
  if (adaptive) {
    const Index basis = use_net ? net->basis_dim : kPendulumBasisDim;
    if (gains.p_adapt.rows() != basis) {
      throw std::invalid_argument("run_scenario: p_adapt/basis size mismatch");
    }
  }

  // Events quantized to ticks, fired in time order (ties keep list order).
  struct Pending {
    Index tick;
    const Event* event;
  };
  std::vector<Pending> pending;
  pending.reserve(scenario.events.size());
  for (const auto& ev : scenario.events) {
    pending.push_back(
        {static_cast<Index>(std::llround(ev.time * scenario.control_rate)),
         &ev});
  }
  std::stable_sort(pending.begin(), pending.end(),
                   [](const Pending& a, const Pending& b) {
                     return a.tick < b.tick;
                   });

  DataBuffer buffer(
      static_cast<Index>(std::llround(scenario.buffer_seconds *
                                      scenario.control_rate)),
      n);

  Vector pos, vel, acc;
  eval_sinusoid(scenario.desired, 0.0, pos, vel, acc);
  const Vector theta0 =
      scenario.initial_theta.size() > 0 ? scenario.initial_theta : pos;
  RobotState state = make_rest_state(m, theta0);

  bool adapting = scenario.adaptation_at_start;
  bool buffering = scenario.buffering_at_start;
  Index net_version = 0;
  Index retrains = 0;

  ScenarioResult result;
  result.log.columns = log_columns(n, scenario.log_lyapunov);
  result.log.n_joints = n;
  result.log.data.resize(ticks, static_cast<Index>(result.log.columns.size()));

  std::size_t next_event = 0;
  for (Index i = 0; i < ticks; ++i) {
    const double t = static_cast<double>(i) * control_dt;

    while (next_event < pending.size() &&
           pending[next_event].tick <= i) {
      const Event& ev = *pending[next_event].event;
      switch (ev.kind) {
        case EventKind::SwitchFriction:
          m.friction.assign(static_cast<std::size_t>(n), ev.friction);
          m.validate();
          break;
        case EventKind::AttachPayload:
          m.payload_mass = ev.payload_mass;
          m.validate();
          break;
        case EventKind::EnableAdaptation:
          adapting = true;
          break;
        case EventKind::BeginBuffering:
          buffering = true;
          break;
        case EventKind::RetrainNow:
          if (net && buffer.size() >= 4) {
            retrain_online(*net, buffer.training_pairs(control_dt),
                           scenario.retrain_config, scenario.retrain_passes,
                           rng);
            ++net_version;
            ++retrains;
          }
          break;
      }
      ++next_event;
    }

    eval_sinusoid(scenario.desired, t, pos, vel, acc);
    const ReferenceState ref =
        reference_signals(state.theta, state.theta_dot, pos, vel, acc, gains);

    Vector cmd;
    Matrix y;
    if (!adaptive) {
      cmd = pd_control(ref, gains);
    } else if (use_net) {
      const Vector x = regressor_input(ref.theta_r_dot, state.theta,
                                       state.theta_dot, ref.theta_r_ddot);
      y = forward_regressor(*net, x);
      cmd = adaptive_control(y, net->out.a_hat, ref, gains);
    } else {
      y = analytic_regressor(m, ref.theta_r_dot, state.theta, state.theta_dot,
                             ref.theta_r_ddot)
              .Y;
      cmd = adaptive_control(y, a_hat_analytic, ref, gains);
    }

    Index col = 0;
    auto row = result.log.data.row(i);
    row[col++] = t;
    auto put = [&](const Vector& v) {
      for (Index j = 0; j < n; ++j) row[col++] = v[j];
    };
    put(state.theta);
    put(pos);
    put(ref.e);
    put(ref.s);
    put(cmd);
    const Vector* a_hat =
        !adaptive ? nullptr : (use_net ? &net->out.a_hat : &a_hat_analytic);
    row[col++] = a_hat ? a_hat->norm() : 0.0;
    row[col++] = static_cast<double>(net_version);
    if (scenario.log_lyapunov) {
      const Vector a_true =
          analytic_regressor(m, Vector::Zero(n), Vector::Zero(n),
                             Vector::Zero(n), Vector::Zero(n))
              .a;
      row[col++] = lyapunov_value(m, state.theta, ref.s,
                                  a_hat_analytic - a_true, gains.p_adapt);
    }

    if (adaptive && adapting) {
      Vector& a_mut = use_net ? net->out.a_hat : a_hat_analytic;
      adapt_output_layer(a_mut, y, ref.s, gains.p_adapt, control_dt);
    }
    if (buffering) {
      buffer.push(state.theta, state.theta_dot, cmd);
    }
    for (Index k = 0; k < substeps; ++k) {
      state = step_rk4(m, state, cmd, scenario.inner_dt, SimMode::Reduced);
    }
  }

  result.final_state = state;
  result.final_a_hat = adaptive
                           ? (use_net ? net->out.a_hat : a_hat_analytic)
                           : Vector();
  result.retrain_count = retrains;
  return result;
}

} // namespace flexnac
