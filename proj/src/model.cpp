#include "mjls/model.hpp"

namespace mjls {

MjlsModel::MjlsModel(std::vector<Eigen::MatrixXd> A, std::vector<Eigen::MatrixXd> B,
                     StochasticMatrix P)
    : A_(std::move(A)), B_(std::move(B)), P_(std::move(P)) {
  if (A_.empty() || B_.size() != A_.size()) {
    throw DimensionMismatchError("need equally many A and B matrices, at least one each");
  }
  if (P_.dim() != static_cast<int>(A_.size())) {
    throw DimensionMismatchError("P has dim " + std::to_string(P_.dim()) + " but there are " +
                                 std::to_string(A_.size()) + " modes");
  }
  const Eigen::Index n = A_.front().rows();
  const Eigen::Index m = B_.front().cols();
  for (std::size_t i = 0; i < A_.size(); ++i) {
    if (A_[i].rows() != n || A_[i].cols() != n) {
      throw DimensionMismatchError("A[" + std::to_string(i + 1) + "] is not " + std::to_string(n) +
                                   "x" + std::to_string(n));
    }
    if (B_[i].rows() != n || B_[i].cols() != m) {
      throw DimensionMismatchError("B[" + std::to_string(i + 1) + "] is not " + std::to_string(n) +
                                   "x" + std::to_string(m));
    }
  }
}

GainSchedule::GainSchedule(std::vector<Eigen::MatrixXd> gains, int num_modes, int clock_modulus)
    : gains_(std::move(gains)), num_modes_(num_modes), clock_modulus_(clock_modulus) {
  if (num_modes_ < 1 || clock_modulus_ < 1) {
    throw DimensionMismatchError("gain schedule needs positive N and T");
  }
  if (gains_.size() != static_cast<std::size_t>(num_modes_) * clock_modulus_) {
    throw DimensionMismatchError("expected " + std::to_string(num_modes_ * clock_modulus_) +
                                 " gain matrices, got " + std::to_string(gains_.size()));
  }
  const Eigen::Index m = gains_.front().rows();
  const Eigen::Index n = gains_.front().cols();
  for (const auto& k : gains_) {
    if (k.rows() != m || k.cols() != n) {
      throw DimensionMismatchError("all gain matrices must share the same shape");
    }
  }
}

GainSchedule GainSchedule::zero(int num_modes, int clock_modulus, int input_dim, int state_dim) {
  std::vector<Eigen::MatrixXd> gains(static_cast<std::size_t>(num_modes) * clock_modulus,
                                     Eigen::MatrixXd::Zero(input_dim, state_dim));
  return GainSchedule(std::move(gains), num_modes, clock_modulus);
}

const Eigen::MatrixXd& GainSchedule::K(int gamma, int delta) const {
  if (gamma < 1 || gamma > num_modes_ || delta < 1 || delta > clock_modulus_) {
    throw std::out_of_range("gain index (" + std::to_string(gamma) + "," + std::to_string(delta) +
                            ") outside <" + std::to_string(num_modes_) + ">x<" +
                            std::to_string(clock_modulus_) + ">");
  }
  return gains_[static_cast<std::size_t>(gamma - 1) * clock_modulus_ + (delta - 1)];
}

Eigen::MatrixXd closed_loop_matrix(const MjlsModel& model, const GainSchedule& gains, int alpha,
                                   int gamma, int delta) {
  if (alpha < 1 || alpha > model.num_modes()) {
    throw std::out_of_range("mode index " + std::to_string(alpha) + " outside <" +
                            std::to_string(model.num_modes()) + ">");
  }
  if (gains.state_dim() != model.state_dim() || gains.input_dim() != model.input_dim() ||
      gains.num_modes() != model.num_modes()) {
    throw DimensionMismatchError("gain schedule does not match model dimensions");
  }
  return model.A(alpha) + model.B(alpha) * gains.K(gamma, delta);
}

}  // namespace mjls
