#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "mjls/errors.hpp"

namespace mjls {

/// The unique integer r in {1,...,T} such that k - r is a multiple of T.
/// One-based counterpart of `k mod T`, defined for any integer k.
int floor_mod(long long k, int modulus);

/// Residue in {1,...,modulus} together with its modulus; the clock value that
/// schedules gains between observations.
struct ModResidue {
  int value;
  int modulus;

  ModResidue(int value, int modulus);

  static ModResidue of(long long k, int modulus) { return {floor_mod(k, modulus), modulus}; }

  /// The next clock tick, wrapping modulus -> 1.
  ModResidue next() const { return {floor_mod(value + 1, modulus), modulus}; }

  friend bool operator==(const ModResidue&, const ModResidue&) = default;
};

/// Row-stochastic square matrix. Entries must lie in [0,1] and each row must
/// sum to 1 within kRowSumTol; rows are renormalized exactly once at
/// construction so downstream sums are clean. Immutable afterwards.
class StochasticMatrix {
public:
  static constexpr double kRowSumTol = 1e-12;

  explicit StochasticMatrix(Eigen::MatrixXd entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }

  /// Transition probability with one-based state indices.
  double prob(int from, int to) const { return entries_(from - 1, to - 1); }

private:
  Eigen::MatrixXd entries_;
};

/// Validates and wraps a square matrix; throws NonStochasticError otherwise.
StochasticMatrix validate_stochastic(const Eigen::MatrixXd& m);

/// Draws the successor of one-based state `from`. Uses the top 53 bits of the
/// generator output so results are identical across platforms.
int sample_next_state(const StochasticMatrix& m, int from, std::mt19937_64& rng);

}  // namespace mjls
