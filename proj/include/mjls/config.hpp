#pragma once

#include <string>
#include <vector>

#include "mjls/model.hpp"
#include "mjls/obsproc.hpp"
#include "mjls/sdpsolve.hpp"
#include "mjls/sim.hpp"

namespace mjls {

struct ObservationSpec {
  enum class Kind { kPeriodicWithFailures, kRenewal, kCustom };
  Kind kind = Kind::kPeriodicWithFailures;
  int tau = 1;
  double p = 1.0;
  std::vector<double> mu;
  Eigen::MatrixXd Q;
  std::vector<int> lambda;
};

/// Deserialized problem description. Errors during parsing carry the offending
/// field path (e.g. "system.P") in a ConfigError.
struct ProblemConfig {
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::MatrixXd> B;
  Eigen::MatrixXd P;
  ObservationSpec observation;
  int clock_modulus = 0;  // 0: default to the observation-chain size
  SolveOptions solver;
  SimConfig sim;
  std::string config_hash;  // fnv1a64 of the raw config bytes
};

ProblemConfig parse_problem_config(const std::string& text);
ProblemConfig load_problem_config(const std::string& path);

MjlsModel make_model(const ProblemConfig& config);
ObservationModel make_observation(const ProblemConfig& config);

struct GainsFile {
  GainSchedule gains;
  std::string config_hash;
  std::uint64_t seed = 0;
};

void write_gains_json(const std::string& path, const GainSchedule& gains,
                      const std::string& config_hash, std::uint64_t seed);
GainsFile read_gains_json(const std::string& path);

struct CertificateFile {
  std::string status;
  double margin = 0.0;
  int iterations = 0;
  double spectral_radius = 0.0;
  bool stable = false;
  int operator_dim = 0;
};

void write_certificate_json(const std::string& path, const CertificateFile& certificate,
                            const std::string& config_hash, std::uint64_t seed);

/// FNV-1a 64-bit hash of a byte string, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace mjls
