#pragma once

#include <vector>

#include "flexnac/control.hpp"
#include "flexnac/network.hpp"
#include "flexnac/rng.hpp"
#include "flexnac/robot.hpp"
#include "flexnac/types.hpp"

namespace flexnac {

/// Uniformly sampled desired trajectory; column j is joint j.
struct Trajectory {
  double dt = 0.0;
  Matrix position;
  Matrix velocity;
  Matrix acceleration;
};

/// Per-joint sinusoid θ_d(t) = A·sin(2πf·t + ψ) with analytic derivatives.
struct SinusoidSpec {
  Vector amplitude;
  Vector frequency_hz;
  Vector phase;
};

void eval_sinusoid(const SinusoidSpec& spec, double t, Vector& position,
                   Vector& velocity, Vector& acceleration);

/// Schroeder-phased multisine, one column per joint:
///   u(t) = A·Σ_{k=1..H} cos(2π·k·f₀·t + φ_k),  φ_k = -π·k·(k-1)/H,
/// rescaled so the sampled peak equals the requested amplitude. Joint j's
/// phases are rotated by 2π·j·k/n to decorrelate the columns. Derivatives
/// are analytic. Requires sample_rate > 2·harmonics·base_frequency.
struct MultisineSpec {
  double base_frequency = 1.0 / 60.0;
  Index harmonics = 48;
  Vector amplitude;
  double duration = 60.0;
  double sample_rate = 100.0;
};

Trajectory gen_multisine(const MultisineSpec& spec);

/// Family of sinusoid trajectories with per-joint amplitude, frequency and
/// phase drawn uniformly from the given ranges. Amplitudes are clamped to
/// position_limit.
struct SinusoidFamilySpec {
  Index count = 30;
  Index samples = 2500;
  double sample_rate = 100.0;
  double min_amplitude = 0.15;
  double max_amplitude = 0.7;
  double min_frequency_hz = 0.1;
  double max_frequency_hz = 0.6;
  double position_limit = 1.2;
};

std::vector<Trajectory> gen_sinusoid_family(const SinusoidFamilySpec& spec,
                                            Index n_joints, Rng& rng);

/// Closed-loop training-data collection: the PD controller tracks each
/// trajectory on the reduced model, logging (θ, θ̇, θ_m) at the trajectory
/// rate. θ̈ is recovered by spline differentiation of θ̇ and the pairs
/// (θ̇, θ, θ̇, θ̈) → θ_m are stacked across trajectories.
struct CollectOptions {
  double inner_dt = 1e-3;
};

TrainBatch collect_dataset(const RobotModel& model,
                           const std::vector<Trajectory>& trajectories,
                           const Gains& gains, const CollectOptions& options);

} // namespace flexnac
