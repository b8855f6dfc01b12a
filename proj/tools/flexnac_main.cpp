// Command-line front end: collect training data, train the regressor
// network, run closed-loop scenarios, and report tracking metrics.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flexnac/config.hpp"
#include "flexnac/dynamics.hpp"
#include "flexnac/io.hpp"
#include "flexnac/metrics.hpp"
#include "flexnac/scenario.hpp"
#include "flexnac/trajectory.hpp"

namespace {

using namespace flexnac;

int run_collect(const std::string& config_path, std::uint32_t seed,
                const std::string& output) {
  const Config cfg = Config::parse_file(config_path);
  const RobotModel model = model_from_config(cfg);
  const NetworkSpec net_spec = network_spec_from_config(cfg);
  const Gains gains =
      gains_from_config(cfg, model.n_joints, net_spec.basis_dim);
  const CollectSpec spec = collect_spec_from_config(cfg, model.n_joints);

  Rng rng(seed);
  std::vector<Trajectory> trajectories;
  if (spec.multisine) {
    trajectories.push_back(gen_multisine(spec.multisine_spec));
  } else {
    trajectories = gen_sinusoid_family(spec.family_spec, model.n_joints, rng);
  }
  const TrainBatch data = collect_dataset(model, trajectories, gains, {});
  save_batch_csv(data, output);
  std::cout << "collected " << data.inputs.rows() << " samples ("
            << trajectories.size() << " trajectories) -> " << output << "\n";
  return 0;
}

int run_train(const std::string& config_path, std::uint32_t seed,
              const std::string& dataset_path, const std::string& output) {
  const Config cfg = Config::parse_file(config_path);
  const RobotModel model = model_from_config(cfg);
  const NetworkSpec net_spec = network_spec_from_config(cfg);
  const TrainBatch data = load_batch_csv(dataset_path);
  if (data.inputs.cols() != 4 * model.n_joints ||
      data.targets.cols() != model.n_joints) {
    throw std::runtime_error("dataset shape does not match the model");
  }

  Rng rng(seed);
  RegressorNet net =
      make_regressor_net(model.n_joints, 4 * model.n_joints,
                         net_spec.hidden_sizes, net_spec.basis_dim, rng);
  const TrainConfig tc = train_config_from_config(cfg);
  const TrainReport report = train_offline(net, data, tc, rng);
  save_network(net, output);

  std::cout << "held-out mse: initial " << report.initial_holdout_mse;
  for (std::size_t e = 0; e < report.epoch_holdout_mse.size(); ++e) {
    std::cout << ", epoch " << e + 1 << " " << report.epoch_holdout_mse[e];
  }
  std::cout << "\nsaved network -> " << output << "\n";
  return 0;
}

int run_scenario_cmd(const std::string& config_path, std::uint32_t seed,
                     const std::string& network_path,
                     const std::string& controller_override,
                     const std::string& output) {
  const Config cfg = Config::parse_file(config_path);
  const RobotModel model = model_from_config(cfg);
  Scenario scenario = scenario_from_config(cfg, model.n_joints);
  if (controller_override == "pd") {
    scenario.controller = ControllerKind::PD;
  } else if (controller_override == "adaptive") {
    scenario.controller = ControllerKind::Adaptive;
  } else if (!controller_override.empty()) {
    throw std::runtime_error("--controller must be pd or adaptive");
  }

  RegressorNet net;
  RegressorNet* net_ptr = nullptr;
  Index basis_dim = kPendulumBasisDim;
  if (scenario.controller == ControllerKind::Adaptive &&
      scenario.regressor == RegressorKind::Network) {
    if (network_path.empty()) {
      throw std::runtime_error("adaptive network scenario needs --network");
    }
    net = load_network(network_path);
    net_ptr = &net;
    basis_dim = net.basis_dim;
  }
  const Gains gains = gains_from_config(cfg, model.n_joints, basis_dim);

  Rng rng(seed);
  const ScenarioResult result = run_scenario(model, scenario, gains, net_ptr, rng);
  export_csv(result.log, output);

  const MetricsReport overall =
      compute_metrics(result.log, 0.0, scenario.duration + 1.0);
  std::cout << "ran " << result.log.data.rows() << " ticks, "
            << result.retrain_count << " retrains, error frobenius "
            << overall.frobenius << " -> " << output << "\n";
  return 0;
}

int run_metrics(const std::string& log_path, double begin, double end) {
  const SimLog log = import_csv(log_path);
  const MetricsReport report = compute_metrics(log, begin, end);
  std::cout << "window [" << report.window_begin << ", " << report.window_end
            << "), " << report.samples << " samples\n";
  for (std::size_t j = 0; j < report.per_joint.size(); ++j) {
    std::cout << "joint " << j << ": l2 " << report.per_joint[j].l2
              << ", linf " << report.per_joint[j].linf << "\n";
  }
  std::cout << "frobenius " << report.frobenius << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"flexible-joint robot simulation and adaptive control"};
  app.require_subcommand(1);

  std::string config_path, output, dataset_path, network_path, log_path;
  std::string controller_override;
  std::uint32_t seed = 1;
  double begin = 0.0, end = 0.0;

  auto* collect = app.add_subcommand("collect", "generate a training dataset");
  collect->add_option("--config", config_path, "scenario config")->required();
  collect->add_option("--seed", seed, "rng seed");
  collect->add_option("--output", output, "dataset csv")->required();

  auto* train = app.add_subcommand("train", "train the regressor network");
  train->add_option("--config", config_path, "scenario config")->required();
  train->add_option("--seed", seed, "rng seed");
  train->add_option("--dataset", dataset_path, "dataset csv")->required();
  train->add_option("--output", output, "network file")->required();

  auto* run = app.add_subcommand("run", "run a closed-loop scenario");
  run->add_option("--config", config_path, "scenario config")->required();
  run->add_option("--seed", seed, "rng seed");
  run->add_option("--network", network_path, "trained network file");
  run->add_option("--controller", controller_override,
                  "override controller: pd | adaptive");
  run->add_option("--output", output, "log csv")->required();

  auto* metrics = app.add_subcommand("metrics", "tracking metrics from a log");
  metrics->add_option("--log", log_path, "log csv")->required();
  metrics->add_option("--begin", begin, "window begin, s")->required();
  metrics->add_option("--end", end, "window end, s")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (collect->parsed()) return run_collect(config_path, seed, output);
    if (train->parsed()) return run_train(config_path, seed, dataset_path, output);
    if (run->parsed()) {
      return run_scenario_cmd(config_path, seed, network_path,
                              controller_override, output);
    }
    if (metrics->parsed()) return run_metrics(log_path, begin, end);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
