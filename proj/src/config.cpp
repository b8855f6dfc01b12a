#include "flexnac/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "flexnac/dynamics.hpp"

namespace flexnac {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> out;
  std::string tok;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!tok.empty()) out.push_back(std::move(tok));
      tok.clear();
    } else {
      tok.push_back(c);
    }
  }
  if (!tok.empty()) out.push_back(std::move(tok));
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument(where + ": bad number '" + s + "'");
  }
  return v;
}

} // namespace

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty() || key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": key outside section");
    }
    cfg.values_[section + "." + key].push_back(value);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  return values_.count(section + "." + key) > 0;
}

std::string Config::get_str(const std::string& section,
                            const std::string& key) const {
  const auto it = values_.find(section + "." + key);
  if (it == values_.end()) {
    throw std::invalid_argument("config: missing [" + section + "] " + key);
  }
  if (it->second.size() != 1) {
    throw std::invalid_argument("config: repeated key [" + section + "] " + key);
  }
  return it->second.front();
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  return has(section, key) ? get_str(section, key) : fallback;
}

double Config::get_num(const std::string& section,
                       const std::string& key) const {
  return to_double(get_str(section, key), "[" + section + "] " + key);
}

double Config::get_num(const std::string& section, const std::string& key,
                       double fallback) const {
  return has(section, key) ? get_num(section, key) : fallback;
}

Index Config::get_int(const std::string& section, const std::string& key,
                      Index fallback) const {
  if (!has(section, key)) return fallback;
  return static_cast<Index>(get_num(section, key));
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_str(section, key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw std::invalid_argument("config: bad bool [" + section + "] " + key);
}

Vector Config::get_vec(const std::string& section, const std::string& key,
                       Index n) const {
  const auto toks = tokenize(get_str(section, key));
  const std::string where = "[" + section + "] " + key;
  if (static_cast<Index>(toks.size()) == n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
      v[i] = to_double(toks[static_cast<std::size_t>(i)], where);
    }
    return v;
  }
  if (toks.size() == 1) {
    return Vector::Constant(n, to_double(toks[0], where));
  }
  throw std::invalid_argument("config: " + where + " expects 1 or " +
                              std::to_string(n) + " values");
}

Vector Config::get_vec(const std::string& section, const std::string& key,
                       Index n, double fallback) const {
  return has(section, key) ? get_vec(section, key, n)
                           : Vector::Constant(n, fallback);
}

std::vector<std::string> Config::get_all(const std::string& section,
                                         const std::string& key) const {
  const auto it = values_.find(section + "." + key);
  return it == values_.end() ? std::vector<std::string>{} : it->second;
}

FrictionModel parse_friction(const std::string& text) {
  const auto toks = tokenize(text);
  if (toks.empty()) throw std::invalid_argument("friction: empty description");
  FrictionModel fr;
  if (toks[0] == "viscous_coulomb") {
    if (toks.size() != 3) {
      throw std::invalid_argument("friction: viscous_coulomb <viscous> <coulomb>");
    }
    fr.kind = FrictionKind::ViscousCoulomb;
    fr.viscous = to_double(toks[1], "friction");
    fr.coulomb = to_double(toks[2], "friction");
  } else if (toks[0] == "stribeck") {
    if (toks.size() != 5) {
      throw std::invalid_argument(
          "friction: stribeck <viscous> <coulomb> <static> <velocity>");
    }
    fr.kind = FrictionKind::Stribeck;
    fr.viscous = to_double(toks[1], "friction");
    fr.coulomb = to_double(toks[2], "friction");
    fr.static_level = to_double(toks[3], "friction");
    fr.stribeck_velocity = to_double(toks[4], "friction");
  } else {
    throw std::invalid_argument("friction: unknown kind '" + toks[0] + "'");
  }
  return fr;
}

RobotModel model_from_config(const Config& cfg) {
  const auto mass_toks = tokenize(cfg.get_str("model", "masses"));
  const auto n = static_cast<Index>(mass_toks.size());
  RobotModel m;
  m.n_joints = n;
  m.link_mass = cfg.get_vec("model", "masses", n);
  m.link_length = cfg.get_vec("model", "lengths", n);
  m.com_offset = cfg.has("model", "com_offsets")
                     ? cfg.get_vec("model", "com_offsets", n)
                     : m.link_length;
  m.gravity = cfg.get_num("model", "gravity", 9.81);
  m.joint_stiffness = cfg.get_num("model", "stiffness", 50.0);
  m.motor_inertia = cfg.get_vec("model", "motor_inertia", n, 0.01);
  m.friction.assign(
      static_cast<std::size_t>(n),
      parse_friction(cfg.get_str("model", "friction", "viscous_coulomb 0 0")));
  m.payload_mass = cfg.get_num("model", "payload", 0.0);
  m.validate();
  return m;
}

Gains gains_from_config(const Config& cfg, Index n_joints, Index basis_dim) {
  Gains g;
  g.lambda = cfg.get_vec("gains", "lambda", n_joints);
  g.k_s = cfg.get_vec("gains", "k_s", n_joints);
  g.k_robust = cfg.get_num("gains", "k_robust", 0.0);
  g.boundary_layer = cfg.get_num("gains", "boundary_layer", 0.01);
  g.k1 = cfg.get_num("gains", "k1", 0.2);
  g.k2 = cfg.get_num("gains", "k2", 0.1);
  g.p_adapt = cfg.get_num("gains", "p_adapt", 0.05) *
              Matrix::Identity(basis_dim, basis_dim);
  g.validate(n_joints);
  return g;
}

TrainConfig train_config_from_config(const Config& cfg) {
  TrainConfig tc;
  tc.batch_size = cfg.get_int("train", "batch_size", tc.batch_size);
  tc.epochs = cfg.get_int("train", "epochs", tc.epochs);
  tc.l2 = cfg.get_num("train", "l2", tc.l2);
  tc.holdout_fraction = cfg.get_num("train", "holdout", tc.holdout_fraction);
  tc.adam.learning_rate =
      cfg.get_num("train", "learning_rate", tc.adam.learning_rate);
  return tc;
}

NetworkSpec network_spec_from_config(const Config& cfg) {
  NetworkSpec spec;
  if (cfg.has("network", "hidden")) {
    const auto toks = tokenize(cfg.get_str("network", "hidden"));
    spec.hidden_sizes.clear();
    for (const auto& t : toks) {
      spec.hidden_sizes.push_back(
          static_cast<Index>(to_double(t, "[network] hidden")));
    }
  }
  spec.basis_dim = cfg.get_int("network", "basis", spec.basis_dim);
  return spec;
}

namespace {

Event parse_event(const std::string& text) {
  const auto toks = tokenize(text);
  if (toks.size() < 2) {
    throw std::invalid_argument("event: expected '<time> <kind> [args]'");
  }
  Event ev;
  ev.time = to_double(toks[0], "event time");
  const std::string& kind = toks[1];
  auto rest = [&]() {
    std::string joined;
    for (std::size_t i = 2; i < toks.size(); ++i) {
      if (!joined.empty()) joined += ' ';
      joined += toks[i];
    }
    return joined;
  };
  if (kind == "switch_friction") {
    ev.kind = EventKind::SwitchFriction;
    ev.friction = parse_friction(rest());
  } else if (kind == "attach_payload") {
    ev.kind = EventKind::AttachPayload;
    if (toks.size() != 3) {
      throw std::invalid_argument("event: attach_payload <mass>");
    }
    ev.payload_mass = to_double(toks[2], "event payload");
  } else if (kind == "enable_adaptation") {
    ev.kind = EventKind::EnableAdaptation;
  } else if (kind == "begin_buffering") {
    ev.kind = EventKind::BeginBuffering;
  } else if (kind == "retrain") {
    ev.kind = EventKind::RetrainNow;
  } else {
    throw std::invalid_argument("event: unknown kind '" + kind + "'");
  }
  return ev;
}

} // namespace

Scenario scenario_from_config(const Config& cfg, Index n_joints) {
  Scenario sc;
  sc.duration = cfg.get_num("scenario", "duration");
  sc.control_rate = cfg.get_num("scenario", "control_rate", 100.0);
  sc.inner_dt = cfg.get_num("scenario", "inner_dt", 1e-3);

  const std::string controller =
      cfg.get_str("scenario", "controller", "adaptive");
  if (controller == "adaptive") {
    sc.controller = ControllerKind::Adaptive;
  } else if (controller == "pd") {
    sc.controller = ControllerKind::PD;
  } else {
    throw std::invalid_argument("config: controller must be adaptive or pd");
  }
  const std::string regressor = cfg.get_str("scenario", "regressor", "network");
  if (regressor == "network") {
    sc.regressor = RegressorKind::Network;
  } else if (regressor == "analytic") {
    sc.regressor = RegressorKind::AnalyticPendulum;
  } else {
    throw std::invalid_argument("config: regressor must be network or analytic");
  }

  sc.desired.amplitude = cfg.get_vec("desired", "amplitude", n_joints);
  sc.desired.frequency_hz = cfg.get_vec("desired", "frequency", n_joints);
  sc.desired.phase = cfg.get_vec("desired", "phase", n_joints, 0.0);

  sc.adaptation_at_start =
      cfg.get_bool("scenario", "adaptation_at_start", false);
  sc.buffering_at_start = cfg.get_bool("scenario", "buffering_at_start", false);
  sc.buffer_seconds = cfg.get_num("scenario", "buffer_seconds", 6.0);
  sc.retrain_passes = cfg.get_int("scenario", "retrain_passes", 50);
  sc.log_lyapunov = cfg.get_bool("scenario", "log_lyapunov", false);
  if (cfg.has("scenario", "initial_theta")) {
    sc.initial_theta = cfg.get_vec("scenario", "initial_theta", n_joints);
  }
  if (cfg.has("scenario", "initial_a_hat")) {
    sc.initial_a_hat =
        cfg.get_vec("scenario", "initial_a_hat", kPendulumBasisDim);
  }
  sc.retrain_config = train_config_from_config(cfg);

  for (const auto& text : cfg.get_all("events", "event")) {
    sc.events.push_back(parse_event(text));
  }
  return sc;
}

CollectSpec collect_spec_from_config(const Config& cfg, Index n_joints) {
  CollectSpec spec;
  const std::string kind = cfg.get_str("collect", "kind", "multisine");
  if (kind == "multisine") {
    spec.multisine = true;
    auto& ms = spec.multisine_spec;
    const double period = cfg.get_num("collect", "period_seconds", 60.0);
    if (period <= 0.0) {
      throw std::invalid_argument("config: period_seconds must be positive");
    }
    ms.base_frequency = 1.0 / period;
    ms.harmonics = cfg.get_int("collect", "harmonics", 48);
    ms.amplitude = cfg.get_vec("collect", "amplitude", n_joints, 0.7);
    ms.duration = cfg.get_num("collect", "duration", period);
    ms.sample_rate = cfg.get_num("collect", "sample_rate", 100.0);
  } else if (kind == "sinusoid_family") {
    spec.multisine = false;
    auto& fam = spec.family_spec;
    fam.count = cfg.get_int("collect", "count", 30);
    fam.samples = cfg.get_int("collect", "samples", 2500);
    fam.sample_rate = cfg.get_num("collect", "sample_rate", 100.0);
    fam.min_amplitude = cfg.get_num("collect", "min_amplitude", 0.15);
    fam.max_amplitude = cfg.get_num("collect", "max_amplitude", 0.7);
    fam.min_frequency_hz = cfg.get_num("collect", "min_frequency", 0.1);
    fam.max_frequency_hz = cfg.get_num("collect", "max_frequency", 0.6);
    fam.position_limit = cfg.get_num("collect", "position_limit", 1.2);
  } else {
    throw std::invalid_argument("config: collect kind '" + kind + "'");
  }
  return spec;
}

} // namespace flexnac
