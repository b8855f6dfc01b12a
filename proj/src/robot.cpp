#include "flexnac/robot.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flexnac {

double friction_torque(const FrictionModel& fr, double velocity) {
  if (!std::isfinite(velocity)) {
    throw std::invalid_argument("friction_torque: non-finite velocity");
  }
  const double s = sgn0(velocity);
  switch (fr.kind) {
    case FrictionKind::ViscousCoulomb:
      return fr.viscous * velocity + fr.coulomb * s;
    case FrictionKind::Stribeck: {
      const double ratio = velocity / fr.stribeck_velocity;
      const double level =
          fr.coulomb + (fr.static_level - fr.coulomb) * std::exp(-ratio * ratio);
      return fr.viscous * velocity + level * s;
    }
  }
  return 0.0;
}

void RobotModel::validate() const {
  if (n_joints < 1) throw std::invalid_argument("RobotModel: n_joints < 1");
  auto check_size = [&](const Vector& v, const char* name) {
    if (v.size() != n_joints) {
      throw std::invalid_argument(std::string("RobotModel: ") + name +
                                  " size != n_joints");
    }
  };
  check_size(link_mass, "link_mass");
  check_size(link_length, "link_length");
  check_size(com_offset, "com_offset");
  check_size(motor_inertia, "motor_inertia");
  if (friction.size() != static_cast<std::size_t>(n_joints)) {
    throw std::invalid_argument("RobotModel: friction size != n_joints");
  }
  if ((link_mass.array() <= 0.0).any() || (link_length.array() <= 0.0).any() ||
      (com_offset.array() <= 0.0).any()) {
    throw std::invalid_argument("RobotModel: masses, lengths, com offsets must be positive");
  }
  if (joint_stiffness <= 0.0) {
    throw std::invalid_argument("RobotModel: joint_stiffness must be positive");
  }
  if ((motor_inertia.array() <= 0.0).any()) {
    throw std::invalid_argument("RobotModel: motor inertias must be positive");
  }
  if (payload_mass < 0.0) {
    throw std::invalid_argument("RobotModel: payload_mass must be non-negative");
  }
  for (const auto& fr : friction) {
    if (fr.viscous < 0.0 || fr.coulomb < 0.0) {
      throw std::invalid_argument("RobotModel: friction coefficients must be non-negative");
    }
    if (fr.kind == FrictionKind::Stribeck) {
      if (fr.static_level < fr.coulomb) {
        throw std::invalid_argument("RobotModel: Stribeck static level below Coulomb level");
      }
      if (fr.stribeck_velocity <= 0.0) {
        throw std::invalid_argument("RobotModel: Stribeck velocity must be positive");
      }
    }
  }
}

RobotModel make_pendulum(double mass, double length, double gravity,
                         double stiffness, double motor_inertia,
                         FrictionModel friction) {
  RobotModel m;
  m.n_joints = 1;
  m.link_mass = Vector::Constant(1, mass);
  m.link_length = Vector::Constant(1, length);
  m.com_offset = Vector::Constant(1, length);
  m.gravity = gravity;
  m.joint_stiffness = stiffness;
  m.motor_inertia = Vector::Constant(1, motor_inertia);
  m.friction = {friction};
  return m;
}

RobotModel make_two_link_arm(const Vector& masses, const Vector& lengths,
                             double gravity, double stiffness,
                             double motor_inertia, FrictionModel friction) {
  if (masses.size() != 2 || lengths.size() != 2) {
    throw std::invalid_argument("make_two_link_arm: expected 2 masses and 2 lengths");
  }
  RobotModel m;
  m.n_joints = 2;
  m.link_mass = masses;
  m.link_length = lengths;
  m.com_offset = lengths;
  m.gravity = gravity;
  m.joint_stiffness = stiffness;
  m.motor_inertia = Vector::Constant(2, motor_inertia);
  m.friction = {friction, friction};
  return m;
}

RobotState make_rest_state(const RobotModel& model, const Vector& theta) {
  if (theta.size() != model.n_joints) {
    throw std::invalid_argument("make_rest_state: theta size != n_joints");
  }
  RobotState s;
  s.theta = theta;
  s.theta_dot = Vector::Zero(model.n_joints);
  s.theta_ddot = Vector::Zero(model.n_joints);
  s.theta_m = theta;
  s.theta_m_dot = Vector::Zero(model.n_joints);
  s.time = 0.0;
  return s;
}

} // namespace flexnac
