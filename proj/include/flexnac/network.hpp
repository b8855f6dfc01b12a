#pragma once

#include <vector>

#include "flexnac/rng.hpp"
#include "flexnac/types.hpp"

namespace flexnac {

/// Fully connected layer, weight is (outputs × inputs).
struct DenseLayer {
  Matrix weight;
  Vector bias;
};

/// Linear output weights â, the fast-timescale parameter estimate. The
/// network's basis output Y(x) is (n_joints × basis_dim) and the prediction
/// is Y(x)·â, so â plays the role of the parameter vector in a
/// linear-in-parameter regressor.
struct OutputLayer {
  Vector a_hat;
};

/// Basis-function network: standardized input, tanh hidden layers, and a
/// linear head producing n_joints·basis_dim values reshaped row-major into
/// the regressor matrix Y(x).
struct RegressorNet {
  Index n_joints = 0;
  Index input_dim = 0;
  Index basis_dim = 0;
  std::vector<DenseLayer> layers; ///< hidden layers + linear head (last)
  OutputLayer out;
  Vector input_mean; ///< set by train_offline from the training split
  Vector input_std;
};

/// Glorot-uniform weights, zero biases, Glorot-uniform â. All randomness
/// comes from rng, so equal seeds give bitwise-equal networks.
RegressorNet make_regressor_net(Index n_joints, Index input_dim,
                                const std::vector<Index>& hidden_sizes,
                                Index basis_dim, Rng& rng);

/// Rows are samples. inputs is (samples × input_dim), targets is
/// (samples × n_joints) motor position commands.
struct TrainBatch {
  Matrix inputs;
  Matrix targets;
};

/// Network input layout shared by dataset collection and the controller:
/// x = [θ̇₁; θ; θ̇₂; θ̈], 4·n values.
Vector regressor_input(const Vector& theta_dot_1, const Vector& theta,
                       const Vector& theta_dot_2, const Vector& theta_ddot);

/// Basis matrix Y(x), (n_joints × basis_dim).
Matrix forward_regressor(const RegressorNet& net, const Vector& x);

/// Network prediction Y(x)·â.
Vector predict(const RegressorNet& net, const Vector& x);

/// Mean squared error over (samples × joints) plus l2·Σ‖W‖²_F over the dense
/// layer weights. Biases and â carry no penalty.
double loss_mse_l2(const RegressorNet& net, const TrainBatch& batch,
                   double l2);

/// Plain mean squared error, the held-out evaluation metric.
double evaluate_mse(const RegressorNet& net, const TrainBatch& batch);

/// Gradients of loss_mse_l2 with respect to every parameter tensor.
struct NetGradients {
  std::vector<Matrix> d_weight;
  std::vector<Vector> d_bias;
  Vector d_a_hat;
};

/// Reverse-mode gradients of loss_mse_l2 on the batch. If loss_out is
/// non-null the loss value of the same pass is stored there.
NetGradients backprop(const RegressorNet& net, const TrainBatch& batch,
                      double l2, double* loss_out = nullptr);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment accumulators matching the net's parameter tensors.
struct AdamState {
  std::vector<Matrix> m_weight, v_weight;
  std::vector<Vector> m_bias, v_bias;
  Vector m_a_hat, v_a_hat;
  long step = 0;
};

AdamState make_adam_state(const RegressorNet& net);

/// One bias-corrected Adam update. With update_a_hat false the output layer
/// and its moments are left untouched (bitwise).
void adam_step(RegressorNet& net, AdamState& state, const NetGradients& grads,
               const AdamConfig& config, bool update_a_hat);

struct TrainConfig {
  Index batch_size = 256;
  Index epochs = 5;
  double l2 = 1e-4;
  double holdout_fraction = 0.2;
  AdamConfig adam;
};

struct TrainReport {
  std::vector<double> epoch_train_loss;
  std::vector<double> epoch_holdout_mse;
  double initial_holdout_mse = 0.0;
  double final_holdout_mse = 0.0;
};

/// Offline training: shuffled holdout split, input standardization fitted on
/// the training split, then epochs of shuffled batch_size chunks (remainder
/// dropped) updating all parameters including â.
TrainReport train_offline(RegressorNet& net, const TrainBatch& data,
                          const TrainConfig& config, Rng& rng);

/// Slow-timescale refit on buffered data: fresh Adam state, â and the stored
/// input standardization kept frozen, chunks keep the remainder so small
/// buffers still train. Returns the last full-data loss.
double retrain_online(RegressorNet& net, const TrainBatch& data,
                      const TrainConfig& config, Index passes, Rng& rng);

} // namespace flexnac
