#include "flexnac/dynamics.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace flexnac {

namespace {

// The chain is modelled as point masses: link i places link_mass[i] at
// com_offset[i] along link i, and a nonzero payload adds payload_mass at the
// distal link's tip. Point mass p spans joints 0..last with lever arms
// r_{p,a} = link_length[a] for a < last and last_radius at a = last.
struct PointMass {
  double mass;
  Index last;
  double last_radius;
};

std::vector<PointMass> point_masses(const RobotModel& model) {
  std::vector<PointMass> pms;
  pms.reserve(static_cast<std::size_t>(model.n_joints) + 1);
  for (Index i = 0; i < model.n_joints; ++i) {
    pms.push_back({model.link_mass[i], i, model.com_offset[i]});
  }
  if (model.payload_mass > 0.0) {
    pms.push_back({model.payload_mass, model.n_joints - 1,
                   model.link_length[model.n_joints - 1]});
  }
  return pms;
}

double radius(const RobotModel& model, const PointMass& pm, Index a) {
  return a < pm.last ? model.link_length[a] : pm.last_radius;
}

// Cumulative joint angles φ_a = Σ_{j≤a} θ_j, measured from straight down.
Vector cumulative_angles(const Vector& theta) {
  Vector phi(theta.size());
  double acc = 0.0;
  for (Index a = 0; a < theta.size(); ++a) {
    acc += theta[a];
    phi[a] = acc;
  }
  return phi;
}

// M(i,j) = Σ_{a≥i, b≥j} S(a,b): 2-D suffix sum.
Matrix suffix_sum_2d(const Matrix& s) {
  const Index n = s.rows();
  Matrix out(n, n);
  for (Index i = n - 1; i >= 0; --i) {
    for (Index j = n - 1; j >= 0; --j) {
      double v = s(i, j);
      if (i + 1 < n) v += out(i + 1, j);
      if (j + 1 < n) v += out(i, j + 1);
      if (i + 1 < n && j + 1 < n) v -= out(i + 1, j + 1);
      out(i, j) = v;
    }
  }
  return out;
}

void check_joint_vector(const RobotModel& model, const Vector& v,
                        const char* where) {
  if (v.size() != model.n_joints) {
    throw std::invalid_argument(std::string(where) + ": size != n_joints");
  }
}

} // namespace

Matrix mass_matrix(const RobotModel& model, const Vector& theta) {
  check_joint_vector(model, theta, "mass_matrix");
  const Index n = model.n_joints;
  const Vector phi = cumulative_angles(theta);
  Matrix s = Matrix::Zero(n, n);
  for (const auto& pm : point_masses(model)) {
    for (Index a = 0; a <= pm.last; ++a) {
      const double ra = pm.mass * radius(model, pm, a);
      for (Index b = 0; b <= pm.last; ++b) {
        s(a, b) += ra * radius(model, pm, b) * std::cos(phi[a] - phi[b]);
      }
    }
  }
  return suffix_sum_2d(s);
}

Matrix coriolis_matrix(const RobotModel& model, const Vector& theta,
                       const Vector& theta_dot) {
  check_joint_vector(model, theta, "coriolis_matrix");
  check_joint_vector(model, theta_dot, "coriolis_matrix");
  const Index n = model.n_joints;
  const Vector phi = cumulative_angles(theta);

  // D(a,b) = Σ_p m·r_a·r_b·sin(φ_a - φ_b), so that
  // ∂S(a,b)/∂θ_k = -D(a,b)·(1[k≤a] - 1[k≤b]).
  Matrix d = Matrix::Zero(n, n);
  for (const auto& pm : point_masses(model)) {
    for (Index a = 0; a <= pm.last; ++a) {
      const double ra = pm.mass * radius(model, pm, a);
      for (Index b = 0; b <= pm.last; ++b) {
        d(a, b) += ra * radius(model, pm, b) * std::sin(phi[a] - phi[b]);
      }
    }
  }

  // dm[k] = ∂M/∂θ_k, suffix-summed from the exact ∂S/∂θ_k above.
  std::vector<Matrix> dm(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    Matrix ds = Matrix::Zero(n, n);
    for (Index a = 0; a < n; ++a) {
      for (Index b = 0; b < n; ++b) {
        const double ind = (k <= a ? 1.0 : 0.0) - (k <= b ? 1.0 : 0.0);
        if (ind != 0.0) ds(a, b) = -d(a, b) * ind;
      }
    }
    dm[static_cast<std::size_t>(k)] = suffix_sum_2d(ds);
  }

  // Christoffel symbols of the first kind: this choice of C makes
  // Ṁ - 2C exactly skew-symmetric.
  Matrix c = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double cij = 0.0;
      for (Index k = 0; k < n; ++k) {
        const auto& mk = dm[static_cast<std::size_t>(k)];
        const auto& mj = dm[static_cast<std::size_t>(j)];
        const auto& mi = dm[static_cast<std::size_t>(i)];
        cij += 0.5 * (mk(i, j) + mj(i, k) - mi(j, k)) * theta_dot[k];
      }
      c(i, j) = cij;
    }
  }
  return c;
}

Vector gravity_torque(const RobotModel& model, const Vector& theta) {
  check_joint_vector(model, theta, "gravity_torque");
  const Index n = model.n_joints;
  const Vector phi = cumulative_angles(theta);
  Vector u = Vector::Zero(n);
  for (const auto& pm : point_masses(model)) {
    for (Index a = 0; a <= pm.last; ++a) {
      u[a] += pm.mass * radius(model, pm, a) * std::sin(phi[a]);
    }
  }
  Vector g(n);
  double acc = 0.0;
  for (Index i = n - 1; i >= 0; --i) {
    acc += u[i];
    g[i] = model.gravity * acc;
  }
  return g;
}

Vector friction_torque(const RobotModel& model, const Vector& theta_dot) {
  check_joint_vector(model, theta_dot, "friction_torque");
  Vector f(model.n_joints);
  for (Index i = 0; i < model.n_joints; ++i) {
    f[i] = friction_torque(model.friction[static_cast<std::size_t>(i)],
                           theta_dot[i]);
  }
  return f;
}

double kinetic_energy(const RobotModel& model, const Vector& theta,
                      const Vector& theta_dot) {
  check_joint_vector(model, theta_dot, "kinetic_energy");
  return 0.5 * theta_dot.dot(mass_matrix(model, theta) * theta_dot);
}

double potential_energy(const RobotModel& model, const Vector& theta) {
  check_joint_vector(model, theta, "potential_energy");
  const Vector phi = cumulative_angles(theta);
  double v = 0.0;
  for (const auto& pm : point_masses(model)) {
    for (Index a = 0; a <= pm.last; ++a) {
      v += pm.mass * radius(model, pm, a) * (1.0 - std::cos(phi[a]));
    }
  }
  return model.gravity * v;
}

namespace {

Vector solve_spd(const Matrix& m, const Vector& rhs, const char* where) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(std::string(where) +
                             ": inertia matrix not positive definite");
  }
  return llt.solve(rhs);
}

} // namespace

Vector link_accel_reduced(const RobotModel& model, const RobotState& state,
                          const Vector& theta_m_cmd) {
  check_joint_vector(model, theta_m_cmd, "link_accel_reduced");
  const double kp = model.joint_stiffness;
  const Vector rhs = kp * theta_m_cmd -
                     coriolis_matrix(model, state.theta, state.theta_dot) *
                         state.theta_dot -
                     gravity_torque(model, state.theta) - kp * state.theta -
                     friction_torque(model, state.theta_dot);
  return solve_spd(mass_matrix(model, state.theta), rhs, "link_accel_reduced");
}

std::pair<Vector, Vector> full_accel(const RobotModel& model,
                                     const RobotState& state,
                                     const Vector& tau) {
  check_joint_vector(model, tau, "full_accel");
  const double kp = model.joint_stiffness;
  const Vector spring = kp * (state.theta - state.theta_m);
  const Vector rhs = -coriolis_matrix(model, state.theta, state.theta_dot) *
                         state.theta_dot -
                     gravity_torque(model, state.theta) -
                     friction_torque(model, state.theta_dot) - spring;
  Vector link = solve_spd(mass_matrix(model, state.theta), rhs, "full_accel");
  Vector motor = (tau + spring).cwiseQuotient(model.motor_inertia);
  return {std::move(link), std::move(motor)};
}

namespace {

// RK4 on the packed state [θ; θ̇] (Reduced) or [θ; θ̇; θ_m; θ̇_m] (Full).
Vector pack(const RobotState& s, SimMode mode) {
  const Index n = s.theta.size();
  if (mode == SimMode::Reduced) {
    Vector y(2 * n);
    y << s.theta, s.theta_dot;
    return y;
  }
  Vector y(4 * n);
  y << s.theta, s.theta_dot, s.theta_m, s.theta_m_dot;
  return y;
}

RobotState unpack(const Vector& y, double time, SimMode mode,
                  const RobotState& base) {
  RobotState s = base;
  const Index n = base.theta.size();
  s.theta = y.segment(0, n);
  s.theta_dot = y.segment(n, n);
  if (mode == SimMode::Full) {
    s.theta_m = y.segment(2 * n, n);
    s.theta_m_dot = y.segment(3 * n, n);
  }
  s.time = time;
  return s;
}

Vector state_derivative(const RobotModel& model, const Vector& y, double time,
                        const InputFn& input, SimMode mode,
                        const RobotState& base) {
  const Index n = model.n_joints;
  RobotState s = unpack(y, time, mode, base);
  const Vector u = input(time, s);
  if (u.size() != n) {
    throw std::invalid_argument("step_rk4: input size != n_joints");
  }
  if (mode == SimMode::Reduced) {
    Vector dy(2 * n);
    dy << s.theta_dot, link_accel_reduced(model, s, u);
    return dy;
  }
  auto [link, motor] = full_accel(model, s, u);
  Vector dy(4 * n);
  dy << s.theta_dot, link, s.theta_m_dot, motor;
  return dy;
}

} // namespace

RobotState step_rk4(const RobotModel& model, const RobotState& state,
                    const InputFn& input, double dt, SimMode mode) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  const Vector y0 = pack(state, mode);
  const double t = state.time;
  const Vector k1 = state_derivative(model, y0, t, input, mode, state);
  const Vector k2 = state_derivative(model, y0 + 0.5 * dt * k1, t + 0.5 * dt,
                                     input, mode, state);
  const Vector k3 = state_derivative(model, y0 + 0.5 * dt * k2, t + 0.5 * dt,
                                     input, mode, state);
  const Vector k4 =
      state_derivative(model, y0 + dt * k3, t + dt, input, mode, state);
  const Vector y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!y1.allFinite()) {
    throw std::runtime_error("step_rk4: state diverged");
  }
  RobotState out = unpack(y1, t + dt, mode, state);
  if (mode == SimMode::Reduced) {
    // The reduced model has no motor dynamics: record the applied command.
    out.theta_m = input(t + dt, out);
    out.theta_m_dot = Vector::Zero(model.n_joints);
    out.theta_ddot = link_accel_reduced(model, out, out.theta_m);
  } else {
    out.theta_ddot = full_accel(model, out, input(t + dt, out)).first;
  }
  return out;
}

RobotState step_rk4(const RobotModel& model, const RobotState& state,
                    const Vector& input, double dt, SimMode mode) {
  check_joint_vector(model, input, "step_rk4");
  return step_rk4(
      model, state,
      InputFn([&input](double, const RobotState&) { return input; }), dt,
      mode);
}

PendulumRegressor analytic_regressor(const RobotModel& model,
                                     const Vector& theta_dot_1,
                                     const Vector& theta,
                                     const Vector& theta_dot_2,
                                     const Vector& theta_ddot) {
  if (model.n_joints != 1) {
    throw std::invalid_argument("analytic_regressor: pendulum only");
  }
  if (model.friction[0].kind != FrictionKind::ViscousCoulomb) {
    throw std::invalid_argument(
        "analytic_regressor: viscous+Coulomb friction only");
  }
  check_joint_vector(model, theta, "analytic_regressor");
  check_joint_vector(model, theta_dot_1, "analytic_regressor");
  check_joint_vector(model, theta_dot_2, "analytic_regressor");
  check_joint_vector(model, theta_ddot, "analytic_regressor");

  const double m = model.link_mass[0];
  const double c = model.com_offset[0];
  const double l = model.link_length[0];
  const double mp = model.payload_mass;
  const double m_eff = m * c * c + mp * l * l;
  const double g_eff = model.gravity * (m * c + mp * l);
  const double kp = model.joint_stiffness;

  PendulumRegressor out;
  out.Y = Matrix(1, kPendulumBasisDim);
  out.Y << theta_ddot[0], std::sin(theta[0]), theta[0], theta_dot_1[0],
      sgn0(theta_dot_1[0]);
  out.a = Vector(kPendulumBasisDim);
  out.a << m_eff, g_eff, kp, model.friction[0].viscous,
      model.friction[0].coulomb;
  out.a /= kp;
  return out;
}

} // namespace flexnac
