#pragma once

#include <vector>

#include "flexnac/types.hpp"

namespace flexnac {

enum class FrictionKind { ViscousCoulomb, Stribeck };

/// Joint friction parameters. The torque law is odd in velocity with
/// sgn(0) = 0, so a joint at rest sees zero friction torque.
struct FrictionModel {
  FrictionKind kind = FrictionKind::ViscousCoulomb;
  double viscous = 0.0;           ///< b [N·m·s/rad]
  double coulomb = 0.0;           ///< c [N·m]
  double static_level = 0.0;      ///< c_s [N·m], Stribeck only (c_s >= c)
  double stribeck_velocity = 0.1; ///< v_s [rad/s], Stribeck only (> 0)
};

/// Friction torque at one joint.
/// ViscousCoulomb: b·v + c·sgn(v).
/// Stribeck:       b·v + (c + (c_s - c)·exp(-(v/v_s)^2))·sgn(v).
double friction_torque(const FrictionModel& fr, double velocity);

/// Planar serial-chain flexible-joint robot. Each link carries a point mass
/// at `com_offset` from its joint, joint angles are measured from the
/// downward vertical, and every motor couples to its link through the shared
/// stiffness `joint_stiffness` (K = k_p·I). An optional payload is a point
/// mass at the distal link tip.
struct RobotModel {
  Index n_joints = 0;
  Vector link_mass;    ///< kg, per link
  Vector link_length;  ///< m, per link
  Vector com_offset;   ///< m from the joint along the link, per link
  double gravity = 9.81;
  double joint_stiffness = 50.0; ///< k_p [N·m/rad], shared by all joints
  Vector motor_inertia;          ///< J_m diagonal entries [kg·m²], per joint
  std::vector<FrictionModel> friction; ///< per joint
  double payload_mass = 0.0;     ///< kg, point mass at the distal link tip

  /// Throws std::invalid_argument on inconsistent sizes or non-positive
  /// masses, lengths, stiffness, or motor inertias.
  void validate() const;
};

/// Single pendulum: point mass at the link tip (com_offset = length).
RobotModel make_pendulum(double mass, double length, double gravity = 9.81,
                         double stiffness = 50.0, double motor_inertia = 0.01,
                         FrictionModel friction = {});

/// Planar 2-link arm with point masses at the link tips.
RobotModel make_two_link_arm(const Vector& masses, const Vector& lengths,
                             double gravity = 9.81, double stiffness = 50.0,
                             double motor_inertia = 0.01,
                             FrictionModel friction = {});

/// Link/motor coordinates at one time instant.
struct RobotState {
  Vector theta;       ///< link positions [rad]
  Vector theta_dot;   ///< link velocities [rad/s]
  Vector theta_ddot;  ///< link accelerations [rad/s²]
  Vector theta_m;     ///< motor positions [rad]
  Vector theta_m_dot; ///< motor velocities [rad/s]
  double time = 0.0;  ///< s
};

/// State at rest with theta_m = theta (unloaded spring).
RobotState make_rest_state(const RobotModel& model, const Vector& theta);

} // namespace flexnac
