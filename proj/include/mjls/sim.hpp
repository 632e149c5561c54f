#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mjls/embedding.hpp"
#include "mjls/model.hpp"
#include "mjls/obsproc.hpp"

namespace mjls {

struct SimConfig {
  long long horizon = 50;
  int num_paths = 100;
  Eigen::VectorXd x0;
  int r0 = 1;
  int s0 = 1;       // 0: drawn uniformly from `initial_set` per path
  int sigma0 = 1;
  long long tau0 = -1;  // last pre-run observation time, must be negative
  std::uint64_t seed = 0;
  bool record_paths = false;
  std::vector<int> initial_set;  // candidates when s0 == 0; empty means all of <M>
};

struct SimResult {
  std::vector<double> mean_sq_norm;                    // per-step sample average, horizon+1 long
  std::vector<std::vector<double>> paths;              // per-path |x(k)|^2 when recorded
  std::vector<std::vector<long long>> observation_times;
};

/// Monte Carlo simulation of the gain-scheduled closed loop. The plant mode r
/// and the observation chain s evolve independently; the pair (tau, sigma)
/// tracks the most recent observation, starting from the arbitrary (tau0,
/// sigma0) until the first observation happens. Bit-identical given the seed;
/// per-path seeds are derived by a counter split so path k does not depend on
/// the number of paths requested.
SimResult simulate_closed_loop(const MjlsModel& model, const ObservationModel& obs,
                               const GainSchedule& gains, const SimConfig& cfg);

/// One directly simulated trajectory of the tuple (r, s, sigma, clock) -- the
/// empirical counterpart of the extended chain, built without reference to its
/// transition matrix.
std::vector<ExtendedState> simulate_extended_tuple(const MjlsModel& model,
                                                   const ObservationModel& obs,
                                                   const SimConfig& cfg);

/// Exact E|x(k)|^2 by propagating the per-state second moments through the
/// extended chain; entry 0 equals |x0|^2. Cross-validates the simulator.
std::vector<double> second_moment_iterate(const MjlsModel& model, const ExtendedChain& chain,
                                          const GainSchedule& gains, const ExtendedState& chi0,
                                          const Eigen::VectorXd& x0, long long horizon);

struct EmbeddingCheck {
  double max_abs_error = 0.0;  // over entries with pbar >= prob_floor on visited rows
  long long steps = 0;
  int rows_compared = 0;
  int entries_compared = 0;
  bool pass = false;
};

/// Compares empirical transition frequencies of the simulated tuple process
/// against the analytic extended-chain matrix. Rows need at least `min_visits`
/// visits to be compared; entries below `prob_floor` are skipped.
EmbeddingCheck validate_embedding(const MjlsModel& model, const ObservationModel& obs,
                                  long long steps, std::uint64_t seed, double tolerance = 0.02,
                                  double prob_floor = 0.01, long long min_visits = 100);

/// CSV with columns k,mean_sq_norm; numbers in shortest round-trip decimal.
void write_summary_csv(std::ostream& out, const SimResult& result, const std::string& header_comment = "");

/// CSV with columns path_id,k,sq_norm; requires record_paths.
void write_paths_csv(std::ostream& out, const SimResult& result, const std::string& header_comment = "");

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

}  // namespace mjls
