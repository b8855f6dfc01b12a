#pragma once

#include <map>
#include <string>
#include <vector>

#include "flexnac/control.hpp"
#include "flexnac/network.hpp"
#include "flexnac/robot.hpp"
#include "flexnac/scenario.hpp"
#include "flexnac/trajectory.hpp"
#include "flexnac/types.hpp"

namespace flexnac {

/// INI-style configuration: [section] headers, key = value lines, '#' or ';'
/// comments. Repeated keys keep every occurrence in file order (used for
/// event lists).
class Config {
public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  /// Single-valued lookups; throw when the key is repeated or missing
  /// (unless a default is given).
  std::string get_str(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_num(const std::string& section, const std::string& key) const;
  double get_num(const std::string& section, const std::string& key,
                 double fallback) const;
  Index get_int(const std::string& section, const std::string& key,
                Index fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;

  /// Whitespace/comma separated numbers. broadcast: a single value may stand
  /// for n copies.
  Vector get_vec(const std::string& section, const std::string& key,
                 Index n) const;
  Vector get_vec(const std::string& section, const std::string& key, Index n,
                 double fallback) const;

  /// Every occurrence of the key, in file order.
  std::vector<std::string> get_all(const std::string& section,
                                   const std::string& key) const;

private:
  std::map<std::string, std::vector<std::string>> values_;
};

/// [model]: type, masses, lengths, com_offsets, gravity, stiffness,
/// motor_inertia, friction, payload.
RobotModel model_from_config(const Config& cfg);

/// [gains]: lambda, k_s, k_robust, boundary_layer, k1, k2, p_adapt.
Gains gains_from_config(const Config& cfg, Index n_joints, Index basis_dim);

/// [scenario] + [desired] + [events] + [train].
Scenario scenario_from_config(const Config& cfg, Index n_joints);

/// [train]: batch_size, epochs, l2, holdout, learning_rate.
TrainConfig train_config_from_config(const Config& cfg);

/// [network]: hidden, basis.
struct NetworkSpec {
  std::vector<Index> hidden_sizes{64, 64};
  Index basis_dim = 32;
};
NetworkSpec network_spec_from_config(const Config& cfg);

/// [collect]: kind = multisine | sinusoid_family plus the matching fields.
struct CollectSpec {
  bool multisine = true;
  MultisineSpec multisine_spec;
  SinusoidFamilySpec family_spec;
};
CollectSpec collect_spec_from_config(const Config& cfg, Index n_joints);

/// Friction description, e.g. "viscous_coulomb 0.05 0.1" or
/// "stribeck 0.3 0.5 1.0 0.1" (viscous, coulomb[, static, velocity]).
FrictionModel parse_friction(const std::string& text);

} // namespace flexnac
