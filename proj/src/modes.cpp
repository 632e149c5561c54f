#include "mjls/modes.hpp"

#include <cmath>

#include "mjls/rng.hpp"

namespace mjls {

int floor_mod(long long k, int modulus) {
  if (modulus < 1) {
    throw std::invalid_argument("floor_mod: modulus must be a positive integer");
  }
  const long long t = modulus;
  return static_cast<int>(((k - 1) % t + t) % t + 1);
}

ModResidue::ModResidue(int value, int modulus) : value(value), modulus(modulus) {
  if (modulus < 1 || value < 1 || value > modulus) {
    throw std::invalid_argument("residue " + std::to_string(value) + " outside <" +
                                std::to_string(modulus) + ">");
  }
}

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw NonStochasticError("matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const double v = entries_(i, j);
      if (!std::isfinite(v) || v < -kRowSumTol || v > 1.0 + kRowSumTol) {
        throw NonStochasticError("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                 ") = " + std::to_string(v) + " outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw NonStochasticError("row " + std::to_string(i + 1) + " sums to " + std::to_string(sum));
    }
    // Renormalize once: clamp roundoff negatives, divide by the row sum.
    Eigen::RowVectorXd row = entries_.row(i).cwiseMax(0.0);
    entries_.row(i) = row / row.sum();
  }
}

StochasticMatrix validate_stochastic(const Eigen::MatrixXd& m) { return StochasticMatrix(m); }

int sample_next_state(const StochasticMatrix& m, int from, std::mt19937_64& rng) {
  const double u = next_unit(rng);
  double acc = 0.0;
  const int dim = m.dim();
  for (int j = 1; j <= dim; ++j) {
    acc += m.prob(from, j);
    if (u < acc) return j;
  }
  // u landed in the roundoff tail; return the last state with positive mass.
  for (int j = dim; j >= 1; --j) {
    if (m.prob(from, j) > 0.0) return j;
  }
  return dim;
}

}  // namespace mjls
