#pragma once

#include <cstdint>
#include <vector>

#include "mjls/modes.hpp"

namespace mjls {

/// Observation-generating Markov chain: the plant mode is observed exactly at
/// the times k with s(k) in Lambda. Lambda must be recurrent, i.e. every
/// closed communicating class of Q meets Lambda, so observations happen
/// infinitely often with probability one. Also carries the clock modulus T
/// used to schedule gains between observations (defaults to the chain size).
class ObservationModel {
public:
  /// `lambda` holds one-based states; `clock_modulus` 0 means "use dim".
  ObservationModel(StochasticMatrix Q, std::vector<int> lambda, int clock_modulus = 0);

  int dim() const { return Q_.dim(); }
  int clock_modulus() const { return clock_modulus_; }
  const StochasticMatrix& Q() const { return Q_; }
  const std::vector<int>& lambda() const { return lambda_; }
  bool in_lambda(int state) const { return lambda_mask_[static_cast<std::size_t>(state) - 1] != 0; }

private:
  StochasticMatrix Q_;
  std::vector<int> lambda_;
  std::vector<char> lambda_mask_;
  int clock_modulus_;
};

/// Attempted observation every `tau` steps, each failing independently with
/// probability 1-p. Gaps between successful observations are tau*Geometric(p).
/// (tau+1)-state chain, Lambda = {1}.
ObservationModel build_periodic_with_failures(int tau, double p, int clock_modulus = 0);

/// Renewal observations with i.i.d. gaps distributed as mu on {1,...,tau},
/// realized by the hazard-rate chain: row k has hazard(k) in column 1 and the
/// survival mass on column k+1. Lambda = {1}.
ObservationModel build_renewal(const std::vector<double>& mu, int clock_modulus = 0);

/// Arbitrary validated chain; covers non-renewal observation processes.
ObservationModel build_custom(const Eigen::MatrixXd& Q, std::vector<int> lambda,
                              int clock_modulus = 0);

/// True iff every closed communicating class of Q (positive-transition graph,
/// SCC condensation) contains a state of lambda.
bool check_recurrent(const StochasticMatrix& Q, const std::vector<int>& lambda);

/// Times k <= horizon with s(k) in Lambda, starting from s(0) = s0.
std::vector<long long> sample_observation_times(const ObservationModel& model, int s0,
                                                long long horizon, std::uint64_t seed);

/// First `count` gaps t_{i+1} - t_i of the observation process from s0.
std::vector<long long> sample_gaps(const ObservationModel& model, int s0, std::size_t count,
                                   std::uint64_t seed);

}  // namespace mjls
