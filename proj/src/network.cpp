#include "flexnac/network.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flexnac {

namespace {

Matrix glorot_uniform(Index rows, Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix w(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      w(r, c) = rng.uniform(-limit, limit);
    }
  }
  return w;
}

void check_shapes(const RegressorNet& net, const TrainBatch& batch) {
  if (batch.inputs.rows() != batch.targets.rows()) {
    throw std::invalid_argument("TrainBatch: inputs/targets row mismatch");
  }
  if (batch.inputs.cols() != net.input_dim) {
    throw std::invalid_argument("TrainBatch: input_dim mismatch");
  }
  if (batch.targets.cols() != net.n_joints) {
    throw std::invalid_argument("TrainBatch: target joint count mismatch");
  }
  if (batch.inputs.rows() == 0) {
    throw std::invalid_argument("TrainBatch: empty batch");
  }
}

// Activations per layer; acts[0] is the standardized input, acts.back() is
// the head's linear output (samples × n_joints·basis_dim).
struct ForwardCache {
  std::vector<Matrix> acts;
};

ForwardCache forward_batch(const RegressorNet& net, const Matrix& inputs) {
  ForwardCache cache;
  cache.acts.reserve(net.layers.size() + 1);
  Matrix a = (inputs.rowwise() - net.input_mean.transpose()).array().rowwise() /
             net.input_std.transpose().array();
  cache.acts.push_back(std::move(a));
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& layer = net.layers[k];
    Matrix z = (cache.acts.back() * layer.weight.transpose()).rowwise() +
               layer.bias.transpose();
    if (k + 1 < net.layers.size()) z = z.array().tanh();
    cache.acts.push_back(std::move(z));
  }
  return cache;
}

// P(s,i) = Σ_j V(s, i·N + j)·â_j: the row-major reshape of the head output
// into Y contracted with â.
Matrix predictions(const RegressorNet& net, const Matrix& head_out) {
  const Index n = net.n_joints;
  const Index nb = net.basis_dim;
  Matrix p(head_out.rows(), n);
  for (Index i = 0; i < n; ++i) {
    p.col(i) = head_out.middleCols(i * nb, nb) * net.out.a_hat;
  }
  return p;
}

double weight_penalty(const RegressorNet& net, double l2) {
  double sum = 0.0;
  for (const auto& layer : net.layers) sum += layer.weight.squaredNorm();
  return l2 * sum;
}

} // namespace

RegressorNet make_regressor_net(Index n_joints, Index input_dim,
                                const std::vector<Index>& hidden_sizes,
                                Index basis_dim, Rng& rng) {
  if (n_joints < 1 || input_dim < 1 || basis_dim < 1) {
    throw std::invalid_argument("make_regressor_net: dimensions must be >= 1");
  }
  for (Index h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("make_regressor_net: hidden size < 1");
  }
  RegressorNet net;
  net.n_joints = n_joints;
  net.input_dim = input_dim;
  net.basis_dim = basis_dim;
  Index in = input_dim;
  for (Index h : hidden_sizes) {
    net.layers.push_back({glorot_uniform(h, in, rng), Vector::Zero(h)});
    in = h;
  }
  const Index head = n_joints * basis_dim;
  net.layers.push_back({glorot_uniform(head, in, rng), Vector::Zero(head)});
  const double a_limit =
      std::sqrt(6.0 / static_cast<double>(basis_dim + n_joints));
  net.out.a_hat = Vector(basis_dim);
  for (Index j = 0; j < basis_dim; ++j) {
    net.out.a_hat[j] = rng.uniform(-a_limit, a_limit);
  }
  net.input_mean = Vector::Zero(input_dim);
  net.input_std = Vector::Ones(input_dim);
  return net;
}

Vector regressor_input(const Vector& theta_dot_1, const Vector& theta,
                       const Vector& theta_dot_2, const Vector& theta_ddot) {
  const Index n = theta.size();
  if (theta_dot_1.size() != n || theta_dot_2.size() != n ||
      theta_ddot.size() != n) {
    throw std::invalid_argument("regressor_input: size mismatch");
  }
  Vector x(4 * n);
  x << theta_dot_1, theta, theta_dot_2, theta_ddot;
  return x;
}

Matrix forward_regressor(const RegressorNet& net, const Vector& x) {
  if (x.size() != net.input_dim) {
    throw std::invalid_argument("forward_regressor: input size mismatch");
  }
  const ForwardCache cache = forward_batch(net, x.transpose());
  const Matrix& head = cache.acts.back();
  Matrix y(net.n_joints, net.basis_dim);
  for (Index i = 0; i < net.n_joints; ++i) {
    y.row(i) = head.row(0).segment(i * net.basis_dim, net.basis_dim);
  }
  return y;
}

Vector predict(const RegressorNet& net, const Vector& x) {
  return forward_regressor(net, x) * net.out.a_hat;
}

double loss_mse_l2(const RegressorNet& net, const TrainBatch& batch,
                   double l2) {
  return evaluate_mse(net, batch) + weight_penalty(net, l2);
}

double evaluate_mse(const RegressorNet& net, const TrainBatch& batch) {
  check_shapes(net, batch);
  const ForwardCache cache = forward_batch(net, batch.inputs);
  const Matrix p = predictions(net, cache.acts.back());
  const double count =
      static_cast<double>(batch.inputs.rows()) * static_cast<double>(net.n_joints);
  return (p - batch.targets).squaredNorm() / count;
}

NetGradients backprop(const RegressorNet& net, const TrainBatch& batch,
                      double l2, double* loss_out) {
  check_shapes(net, batch);
  const std::size_t num_layers = net.layers.size();
  const Index n = net.n_joints;
  const Index nb = net.basis_dim;

  const ForwardCache cache = forward_batch(net, batch.inputs);
  const Matrix& head = cache.acts.back();
  const Matrix p = predictions(net, head);
  const double count =
      static_cast<double>(batch.inputs.rows()) * static_cast<double>(n);
  const Matrix err = p - batch.targets;
  if (loss_out) {
    *loss_out = err.squaredNorm() / count + weight_penalty(net, l2);
  }

  NetGradients g;
  g.d_weight.resize(num_layers);
  g.d_bias.resize(num_layers);

  const Matrix dp = (2.0 / count) * err;
  Matrix dhead = Matrix::Zero(head.rows(), head.cols());
  g.d_a_hat = Vector::Zero(nb);
  for (Index i = 0; i < n; ++i) {
    dhead.middleCols(i * nb, nb) = dp.col(i) * net.out.a_hat.transpose();
    g.d_a_hat += head.middleCols(i * nb, nb).transpose() * dp.col(i);
  }

  // Walk layers backwards; dz is the gradient at each layer's pre-activation.
  Matrix dz = std::move(dhead);
  for (std::size_t k = num_layers; k-- > 0;) {
    const auto& layer = net.layers[k];
    if (k + 1 < num_layers) {
      // Downstream of a tanh layer: acts[k+1] = tanh(z).
      dz = dz.array() * (1.0 - cache.acts[k + 1].array().square());
    }
    g.d_weight[k] = dz.transpose() * cache.acts[k] + 2.0 * l2 * layer.weight;
    g.d_bias[k] = dz.colwise().sum().transpose();
    if (k > 0) dz = dz * layer.weight;
  }
  return g;
}

AdamState make_adam_state(const RegressorNet& net) {
  AdamState st;
  for (const auto& layer : net.layers) {
    st.m_weight.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
    st.v_weight.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
    st.m_bias.push_back(Vector::Zero(layer.bias.size()));
    st.v_bias.push_back(Vector::Zero(layer.bias.size()));
  }
  st.m_a_hat = Vector::Zero(net.out.a_hat.size());
  st.v_a_hat = Vector::Zero(net.out.a_hat.size());
  return st;
}

namespace {

template <typename T>
void adam_update(T& param, T& m, T& v, const T& grad, const AdamConfig& cfg,
                 double bc1, double bc2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v.array() + (1.0 - cfg.beta2) * grad.array().square();
  param.array() -= cfg.learning_rate * (m.array() / bc1) /
                   ((v.array() / bc2).sqrt() + cfg.epsilon);
}

} // namespace

void adam_step(RegressorNet& net, AdamState& state, const NetGradients& grads,
               const AdamConfig& config, bool update_a_hat) {
  if (grads.d_weight.size() != net.layers.size()) {
    throw std::invalid_argument("adam_step: gradient/layer count mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    adam_update(net.layers[k].weight, state.m_weight[k], state.v_weight[k],
                grads.d_weight[k], config, bc1, bc2);
    adam_update(net.layers[k].bias, state.m_bias[k], state.v_bias[k],
                grads.d_bias[k], config, bc1, bc2);
  }
  if (update_a_hat) {
    adam_update(net.out.a_hat, state.m_a_hat, state.v_a_hat, grads.d_a_hat,
                config, bc1, bc2);
  }
}

namespace {

TrainBatch gather(const TrainBatch& data, const std::vector<std::size_t>& idx,
                  std::size_t begin, std::size_t end) {
  TrainBatch out;
  const Index rows = static_cast<Index>(end - begin);
  out.inputs.resize(rows, data.inputs.cols());
  out.targets.resize(rows, data.targets.cols());
  for (std::size_t i = begin; i < end; ++i) {
    out.inputs.row(static_cast<Index>(i - begin)) =
        data.inputs.row(static_cast<Index>(idx[i]));
    out.targets.row(static_cast<Index>(i - begin)) =
        data.targets.row(static_cast<Index>(idx[i]));
  }
  return out;
}

} // namespace

TrainReport train_offline(RegressorNet& net, const TrainBatch& data,
                          const TrainConfig& config, Rng& rng) {
  check_shapes(net, data);
  const std::size_t total = static_cast<std::size_t>(data.inputs.rows());
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);

  auto n_hold = static_cast<std::size_t>(
      std::llround(config.holdout_fraction * static_cast<double>(total)));
  if (n_hold >= total) n_hold = total - 1;
  std::vector<std::size_t> hold_idx(idx.begin(),
                                    idx.begin() + static_cast<long>(n_hold));
  std::vector<std::size_t> train_idx(idx.begin() + static_cast<long>(n_hold),
                                     idx.end());

  const TrainBatch train_all = gather(data, train_idx, 0, train_idx.size());
  const TrainBatch holdout =
      n_hold > 0 ? gather(data, hold_idx, 0, hold_idx.size()) : train_all;

  // Standardization fitted on the training split only.
  net.input_mean = train_all.inputs.colwise().mean().transpose();
  Matrix centered =
      train_all.inputs.rowwise() - net.input_mean.transpose();
  net.input_std = (centered.array().square().colwise().mean())
                      .sqrt()
                      .transpose()
                      .matrix()
                      .cwiseMax(1e-12);

  TrainReport report;
  report.initial_holdout_mse = evaluate_mse(net, holdout);

  AdamState adam = make_adam_state(net);
  const std::size_t batch = static_cast<std::size_t>(config.batch_size) <
                                    train_idx.size()
                                ? static_cast<std::size_t>(config.batch_size)
                                : train_idx.size();
  for (Index epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(train_idx);
    double loss_sum = 0.0;
    std::size_t chunks = 0;
    for (std::size_t start = 0; start + batch <= train_idx.size();
         start += batch) {
      const TrainBatch chunk = gather(data, train_idx, start, start + batch);
      double loss = 0.0;
      const NetGradients g = backprop(net, chunk, config.l2, &loss);
      adam_step(net, adam, g, config.adam, true);
      loss_sum += loss;
      ++chunks;
    }
    report.epoch_train_loss.push_back(chunks > 0 ? loss_sum / chunks : 0.0);
    report.epoch_holdout_mse.push_back(evaluate_mse(net, holdout));
  }
  report.final_holdout_mse = report.epoch_holdout_mse.empty()
                                 ? report.initial_holdout_mse
                                 : report.epoch_holdout_mse.back();
  return report;
}

double retrain_online(RegressorNet& net, const TrainBatch& data,
                      const TrainConfig& config, Index passes, Rng& rng) {
  check_shapes(net, data);
  const std::size_t total = static_cast<std::size_t>(data.inputs.rows());
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});

  AdamState adam = make_adam_state(net);
  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (Index pass = 0; pass < passes; ++pass) {
    rng.shuffle(idx);
    for (std::size_t start = 0; start < total; start += batch) {
      const std::size_t end = start + batch < total ? start + batch : total;
      const TrainBatch chunk = gather(data, idx, start, end);
      const NetGradients g = backprop(net, chunk, config.l2, nullptr);
      adam_step(net, adam, g, config.adam, false);
    }
  }
  return loss_mse_l2(net, data, config.l2);
}

} // namespace flexnac
