#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mjls/modes.hpp"

namespace mjls {

/// Jump-linear plant x(k+1) = A_{r(k)} x(k) + B_{r(k)} u(k) whose mode r
/// follows the Markov chain with transition matrix P. Shapes are validated
/// once here; downstream modules never re-check them.
class MjlsModel {
public:
  MjlsModel(std::vector<Eigen::MatrixXd> A, std::vector<Eigen::MatrixXd> B, StochasticMatrix P);

  int num_modes() const { return static_cast<int>(A_.size()); }
  int state_dim() const { return static_cast<int>(A_.front().rows()); }
  int input_dim() const { return static_cast<int>(B_.front().cols()); }

  /// Mode matrices, one-based mode index.
  const Eigen::MatrixXd& A(int mode) const { return A_.at(static_cast<std::size_t>(mode) - 1); }
  const Eigen::MatrixXd& B(int mode) const { return B_.at(static_cast<std::size_t>(mode) - 1); }
  const StochasticMatrix& P() const { return P_; }

private:
  std::vector<Eigen::MatrixXd> A_;
  std::vector<Eigen::MatrixXd> B_;
  StochasticMatrix P_;
};

/// Feedback gains K_{gamma,delta}: one m-by-n matrix per (last observed mode,
/// scheduling clock) pair, gamma in {1..N}, delta in {1..T}.
class GainSchedule {
public:
  GainSchedule(std::vector<Eigen::MatrixXd> gains, int num_modes, int clock_modulus);

  static GainSchedule zero(int num_modes, int clock_modulus, int input_dim, int state_dim);

  int num_modes() const { return num_modes_; }
  int clock_modulus() const { return clock_modulus_; }
  int input_dim() const { return static_cast<int>(gains_.front().rows()); }
  int state_dim() const { return static_cast<int>(gains_.front().cols()); }

  const Eigen::MatrixXd& K(int gamma, int delta) const;

private:
  std::vector<Eigen::MatrixXd> gains_;  // (gamma-1) * clock_modulus_ + (delta-1)
  int num_modes_;
  int clock_modulus_;
};

/// Closed-loop mode matrix A_alpha + B_alpha K_{gamma,delta}.
Eigen::MatrixXd closed_loop_matrix(const MjlsModel& model, const GainSchedule& gains, int alpha,
                                   int gamma, int delta);

}  // namespace mjls
