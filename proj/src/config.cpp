#include "mjls/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mjls {
namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what, e.what());
  }
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
  }
  return j.at(key);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

long long as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ConfigError(path, "rows must be nonempty arrays");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError(path, "row " + std::to_string(i + 1) + " has inconsistent length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          as_double(j[i][c], path + "[" + std::to_string(i) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_double(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<Eigen::MatrixXd> as_matrix_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of matrices");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_matrix(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ObservationSpec parse_observation(const json& j, const std::string& path) {
  ObservationSpec spec;
  if (!j.is_object() || j.size() != 1) {
    throw ConfigError(path,
                      "expected exactly one of periodic_with_failures, renewal, custom");
  }
  if (j.contains("periodic_with_failures")) {
    const json& o = j.at("periodic_with_failures");
    const std::string p = join(path, "periodic_with_failures");
    spec.kind = ObservationSpec::Kind::kPeriodicWithFailures;
    spec.tau = static_cast<int>(as_int(require(o, "tau", p), join(p, "tau")));
    spec.p = as_double(require(o, "p", p), join(p, "p"));
  } else if (j.contains("renewal")) {
    const json& o = j.at("renewal");
    const std::string p = join(path, "renewal");
    spec.kind = ObservationSpec::Kind::kRenewal;
    const json& mu = require(o, "mu", p);
    if (!mu.is_array() || mu.empty()) throw ConfigError(join(p, "mu"), "expected a nonempty array");
    for (std::size_t i = 0; i < mu.size(); ++i) {
      spec.mu.push_back(as_double(mu[i], join(p, "mu") + "[" + std::to_string(i) + "]"));
    }
  } else if (j.contains("custom")) {
    const json& o = j.at("custom");
    const std::string p = join(path, "custom");
    spec.kind = ObservationSpec::Kind::kCustom;
    spec.Q = as_matrix(require(o, "Q", p), join(p, "Q"));
    const json& lam = require(o, "lambda_set", p);
    if (!lam.is_array() || lam.empty()) {
      throw ConfigError(join(p, "lambda_set"), "expected a nonempty array of states");
    }
    for (std::size_t i = 0; i < lam.size(); ++i) {
      spec.lambda.push_back(static_cast<int>(
          as_int(lam[i], join(p, "lambda_set") + "[" + std::to_string(i) + "]")));
    }
  } else {
    throw ConfigError(path, "unknown observation kind");
  }
  return spec;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

ProblemConfig parse_problem_config(const std::string& text) {
  const json j = parse_json(text, "config");
  ProblemConfig cfg;
  cfg.config_hash = fnv1a_hex(text);

  const json& system = require(j, "system", "");
  cfg.A = as_matrix_list(require(system, "A", "system"), "system.A");
  cfg.B = as_matrix_list(require(system, "B", "system"), "system.B");
  cfg.P = as_matrix(require(system, "P", "system"), "system.P");

  cfg.observation = parse_observation(require(j, "observation", ""), "observation");

  if (j.contains("T")) {
    cfg.clock_modulus = static_cast<int>(as_int(j.at("T"), "T"));
    if (cfg.clock_modulus < 1) throw ConfigError("T", "must be a positive integer");
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("max_iterations")) {
      cfg.solver.max_iterations =
          static_cast<int>(as_int(s.at("max_iterations"), "solver.max_iterations"));
    }
    if (s.contains("margin_target")) {
      cfg.solver.margin_target = as_double(s.at("margin_target"), "solver.margin_target");
    }
    if (s.contains("tolerance")) {
      cfg.solver.tolerance = as_double(s.at("tolerance"), "solver.tolerance");
    }
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    if (s.contains("horizon")) cfg.sim.horizon = as_int(s.at("horizon"), "sim.horizon");
    if (s.contains("num_paths")) {
      cfg.sim.num_paths = static_cast<int>(as_int(s.at("num_paths"), "sim.num_paths"));
    }
    if (s.contains("x0")) cfg.sim.x0 = as_vector(s.at("x0"), "sim.x0");
    if (s.contains("r0")) cfg.sim.r0 = static_cast<int>(as_int(s.at("r0"), "sim.r0"));
    if (s.contains("s0")) cfg.sim.s0 = static_cast<int>(as_int(s.at("s0"), "sim.s0"));
    if (s.contains("sigma0")) {
      cfg.sim.sigma0 = static_cast<int>(as_int(s.at("sigma0"), "sim.sigma0"));
    }
    if (s.contains("tau0")) cfg.sim.tau0 = as_int(s.at("tau0"), "sim.tau0");
    if (s.contains("seed")) {
      cfg.sim.seed = static_cast<std::uint64_t>(as_int(s.at("seed"), "sim.seed"));
    }
  }
  return cfg;
}

ProblemConfig load_problem_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_config(buf.str());
}

MjlsModel make_model(const ProblemConfig& config) {
  StochasticMatrix p = [&] {
    try {
      return validate_stochastic(config.P);
    } catch (const NonStochasticError& e) {
      throw ConfigError("system.P", e.what());
    }
  }();
  try {
    return MjlsModel(config.A, config.B, std::move(p));
  } catch (const DimensionMismatchError& e) {
    throw ConfigError("system", e.what());
  }
}

ObservationModel make_observation(const ProblemConfig& config) {
  try {
    switch (config.observation.kind) {
      case ObservationSpec::Kind::kPeriodicWithFailures:
        return build_periodic_with_failures(config.observation.tau, config.observation.p,
                                            config.clock_modulus);
      case ObservationSpec::Kind::kRenewal:
        return build_renewal(config.observation.mu, config.clock_modulus);
      case ObservationSpec::Kind::kCustom:
        return build_custom(config.observation.Q, config.observation.lambda,
                            config.clock_modulus);
    }
  } catch (const std::exception& e) {
    throw ConfigError("observation", e.what());
  }
  throw ConfigError("observation", "unknown observation kind");
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_gains_json(const std::string& path, const GainSchedule& gains,
                      const std::string& config_hash, std::uint64_t seed) {
  json j;
  j["num_modes"] = gains.num_modes();
  j["clock_modulus"] = gains.clock_modulus();
  j["input_dim"] = gains.input_dim();
  j["state_dim"] = gains.state_dim();
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  json list = json::array();
  for (int gamma = 1; gamma <= gains.num_modes(); ++gamma) {
    for (int delta = 1; delta <= gains.clock_modulus(); ++delta) {
      json entry;
      entry["gamma"] = gamma;
      entry["delta"] = delta;
      entry["K"] = matrix_to_json(gains.K(gamma, delta));
      list.push_back(std::move(entry));
    }
  }
  j["gains"] = std::move(list);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("gains", "cannot write " + path);
  out << j.dump(2) << "\n";
}

GainsFile read_gains_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("gains", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const json j = parse_json(buf.str(), "gains");

  const int num_modes = static_cast<int>(as_int(require(j, "num_modes", "gains"), "gains.num_modes"));
  const int clock = static_cast<int>(
      as_int(require(j, "clock_modulus", "gains"), "gains.clock_modulus"));
  const json& list = require(j, "gains", "gains");
  if (!list.is_array() || list.size() != static_cast<std::size_t>(num_modes) * clock) {
    throw ConfigError("gains.gains", "expected " + std::to_string(num_modes * clock) +
                                         " gain entries");
  }
  std::vector<Eigen::MatrixXd> mats(static_cast<std::size_t>(num_modes) * clock);
  std::vector<char> seen(mats.size(), 0);
  for (const json& entry : list) {
    const int gamma = static_cast<int>(as_int(require(entry, "gamma", "gains.gains"),
                                              "gains.gains.gamma"));
    const int delta = static_cast<int>(as_int(require(entry, "delta", "gains.gains"),
                                              "gains.gains.delta"));
    if (gamma < 1 || gamma > num_modes || delta < 1 || delta > clock) {
      throw ConfigError("gains.gains", "index (" + std::to_string(gamma) + "," +
                                           std::to_string(delta) + ") out of range");
    }
    const std::size_t slot = static_cast<std::size_t>(gamma - 1) * clock + (delta - 1);
    if (seen[slot]) throw ConfigError("gains.gains", "duplicate gain entry");
    seen[slot] = 1;
    mats[slot] = as_matrix(require(entry, "K", "gains.gains"), "gains.gains.K");
  }
  GainsFile out{GainSchedule(std::move(mats), num_modes, clock), "", 0};
  if (j.contains("config_hash")) out.config_hash = j.at("config_hash").get<std::string>();
  if (j.contains("seed")) out.seed = j.at("seed").get<std::uint64_t>();
  return out;
}

void write_certificate_json(const std::string& path, const CertificateFile& certificate,
                            const std::string& config_hash, std::uint64_t seed) {
  json j;
  j["status"] = certificate.status;
  j["margin"] = certificate.margin;
  j["iterations"] = certificate.iterations;
  j["spectral_radius"] = certificate.spectral_radius;
  j["stable"] = certificate.stable;
  j["operator_dim"] = certificate.operator_dim;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("certificate", "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace mjls
