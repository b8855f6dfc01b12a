#pragma once

#include <string>
#include <vector>

#include "flexnac/control.hpp"
#include "flexnac/network.hpp"
#include "flexnac/rng.hpp"
#include "flexnac/robot.hpp"
#include "flexnac/trajectory.hpp"
#include "flexnac/types.hpp"

namespace flexnac {

/// Timed change applied to the closed loop while it runs.
enum class EventKind {
  SwitchFriction,   ///< replace every joint's friction model
  AttachPayload,    ///< set the tip payload mass
  EnableAdaptation, ///< start the fast-timescale â update
  BeginBuffering,   ///< start filling the retraining buffer
  RetrainNow        ///< synchronously refit the network on the buffer
};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::EnableAdaptation;
  FrictionModel friction;     ///< SwitchFriction payload
  double payload_mass = 0.0;  ///< AttachPayload payload
};

/// Ring buffer of raw control-rate samples (θ, θ̇, θ_m). Training pairs are
/// produced on demand: θ̈ comes from spline differentiation of the buffered
/// θ̇, so the buffer must hold contiguous ticks, which push() guarantees.
class DataBuffer {
public:
  DataBuffer(Index capacity, Index n_joints);

  void push(const Vector& theta, const Vector& theta_dot,
            const Vector& theta_m);
  Index size() const { return count_; }
  Index capacity() const { return capacity_; }

  /// Pairs (θ̇, θ, θ̇, θ̈) → θ_m over the buffered window, oldest first.
  /// Requires at least 4 samples.
  TrainBatch training_pairs(double dt) const;

private:
  Matrix theta_, theta_dot_, theta_m_;
  Index capacity_ = 0, head_ = 0, count_ = 0;
};

enum class ControllerKind { PD, Adaptive };
enum class RegressorKind { Network, AnalyticPendulum };

/// Closed-loop experiment description: which controller tracks which
/// sinusoid on which timeline. Event times are quantized to the nearest
/// control tick. Retraining runs synchronously between ticks and does not
/// advance simulated time.
struct Scenario {
  double duration = 40.0;
  double control_rate = 100.0;
  double inner_dt = 1e-3;
  ControllerKind controller = ControllerKind::Adaptive;
  RegressorKind regressor = RegressorKind::Network;
  SinusoidSpec desired;
  std::vector<Event> events;
  Vector initial_theta;        ///< empty: start at θ_d(0)
  Vector initial_a_hat;        ///< analytic regressor only; empty: zeros
  bool adaptation_at_start = false;
  bool buffering_at_start = false;
  double buffer_seconds = 6.0; ///< ring capacity in seconds of ticks
  Index retrain_passes = 50;
  TrainConfig retrain_config;
  bool log_lyapunov = false;   ///< analytic regressor only (needs true a)
};

/// Per-tick log. Columns are named; error/sliding columns are e_<j>, s_<j>.
struct SimLog {
  std::vector<std::string> columns;
  Matrix data;
  Index n_joints = 0;

  Index column(const std::string& name) const; ///< throws if absent
};

struct ScenarioResult {
  SimLog log;
  RobotState final_state;
  Vector final_a_hat;
  Index retrain_count = 0;
};

/// Runs the closed loop on the reduced model at control_rate with RK4
/// substeps of inner_dt and zero-order-hold commands. net may be null for
/// the PD controller or the analytic regressor; it is modified in place
/// (â by adaptation, weights by retraining).
ScenarioResult run_scenario(const RobotModel& model, const Scenario& scenario,
                            const Gains& gains, RegressorNet* net, Rng& rng);

} // namespace flexnac
