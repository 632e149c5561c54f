#include "mjls/synth.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace mjls {
namespace {

constexpr double kMaxGainCondition = 1e12;

// Closed-loop matrices Gamma_chi = A_alpha + B_alpha K_{gamma,delta}, flat order.
std::vector<Eigen::MatrixXd> closed_loop_family(const MjlsModel& model, const ExtendedChain& chain,
                                                const GainSchedule& gains) {
  std::vector<Eigen::MatrixXd> gamma;
  gamma.reserve(static_cast<std::size_t>(chain.size()));
  for (const ExtendedState& chi : chain.states()) {
    gamma.push_back(model.A(chi.alpha) + model.B(chi.alpha) * gains.K(chi.gamma, chi.delta));
  }
  return gamma;
}

std::vector<Eigen::MatrixXd> apply_operator(const Eigen::MatrixXd& pbar,
                                            const std::vector<Eigen::MatrixXd>& gamma,
                                            const std::vector<Eigen::MatrixXd>& x) {
  const int size = static_cast<int>(gamma.size());
  const int n = static_cast<int>(gamma.front().rows());
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(size), Eigen::MatrixXd::Zero(n, n));
  for (int from = 0; from < size; ++from) {
    const Eigen::MatrixXd w = gamma[static_cast<std::size_t>(from)] *
                              x[static_cast<std::size_t>(from)] *
                              gamma[static_cast<std::size_t>(from)].transpose();
    for (int to = 0; to < size; ++to) {
      const double p = pbar(from, to);
      if (p != 0.0) out[static_cast<std::size_t>(to)] += p * w;
    }
  }
  return out;
}

double spectral_radius_dense(const Eigen::MatrixXd& pbar,
                             const std::vector<Eigen::MatrixXd>& gamma, int n) {
  const int size = static_cast<int>(gamma.size());
  const int dim = size * n * n;
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(dim, dim);
  for (int from = 0; from < size; ++from) {
    // Column-major vec: vec(G X G^T) = (G (x) G) vec(X).
    Eigen::MatrixXd kron(n * n, n * n);
    const Eigen::MatrixXd& g = gamma[static_cast<std::size_t>(from)];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = g(i, j) * g;
    }
    for (int to = 0; to < size; ++to) {
      const double p = pbar(from, to);
      if (p != 0.0) op.block(to * n * n, from * n * n, n * n, n * n) = p * kron;
    }
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> es(op, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius_power(const Eigen::MatrixXd& pbar,
                             const std::vector<Eigen::MatrixXd>& gamma, int n) {
  // Shifted power iteration on (L + I)/2, started inside the PSD cone which L
  // preserves. The shift makes the radius strictly dominant even when the
  // chain is periodic and L has several eigenvalues of maximal modulus.
  const int size = static_cast<int>(gamma.size());
  std::vector<Eigen::MatrixXd> x(static_cast<std::size_t>(size),
                                 Eigen::MatrixXd::Identity(n, n) /
                                     std::sqrt(static_cast<double>(size) * n));
  double shifted = 0.0;
  for (int it = 0; it < 50000; ++it) {
    std::vector<Eigen::MatrixXd> next = apply_operator(pbar, gamma, x);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = 0.5 * (next[i] + x[i]);
      norm_sq += next[i].squaredNorm();
    }
    const double estimate = std::sqrt(norm_sq);  // previous iterate has unit norm
    if (estimate == 0.0) return 0.0;
    for (auto& m : next) m /= estimate;
    x = std::move(next);
    if (it > 10 && std::abs(estimate - shifted) <= 1e-13 * std::max(1.0, estimate)) {
      return 2.0 * estimate - 1.0;
    }
    shifted = estimate;
  }
  return 2.0 * shifted - 1.0;
}

}  // namespace

GainSchedule extract_gains(const SdpSolution& solution, const LmiVariableLayout& layout) {
  if (solution.status != SolveStatus::kFeasible) {
    throw std::invalid_argument("gains can only be extracted from a feasible solution");
  }
  const int num_modes = layout.dims().num_modes;
  const int clock = layout.dims().clock_modulus;
  std::vector<Eigen::MatrixXd> gains;
  gains.reserve(static_cast<std::size_t>(num_modes) * clock);
  for (int gamma = 1; gamma <= num_modes; ++gamma) {
    for (int delta = 1; delta <= clock; ++delta) {
      const Eigen::MatrixXd g = layout.g_matrix(solution.assignment, gamma, delta);
      const Eigen::MatrixXd f = layout.f_matrix(solution.assignment, gamma, delta);
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
      const double smin = svd.singularValues().minCoeff();
      const double smax = svd.singularValues().maxCoeff();
      if (!(smin > 0.0) || smax / smin > kMaxGainCondition) {
        throw SingularGainError("G(" + std::to_string(gamma) + "," + std::to_string(delta) +
                                ") is numerically singular");
      }
      // K = F G^-1, via the transposed solve G^T K^T = F^T.
      gains.push_back(g.transpose().partialPivLu().solve(f.transpose()).transpose());
    }
  }
  return GainSchedule(std::move(gains), num_modes, clock);
}

double second_moment_spectral_radius(const MjlsModel& model, const ExtendedChain& chain,
                                     const GainSchedule& gains, int dense_limit) {
  if (gains.num_modes() != model.num_modes() ||
      gains.clock_modulus() != chain.dims().clock_modulus ||
      gains.state_dim() != model.state_dim() || gains.input_dim() != model.input_dim()) {
    throw DimensionMismatchError("gain schedule does not match model/chain dimensions");
  }
  const int n = model.state_dim();
  const std::vector<Eigen::MatrixXd> gamma = closed_loop_family(model, chain, gains);
  const int dim = chain.size() * n * n;
  return dim <= dense_limit ? spectral_radius_dense(chain.pbar().entries(), gamma, n)
                            : spectral_radius_power(chain.pbar().entries(), gamma, n);
}

StabilityCertificate certify_mss(const MjlsModel& model, const ExtendedChain& chain,
                                 const GainSchedule& gains) {
  StabilityCertificate cert;
  cert.operator_dim = chain.size() * model.state_dim() * model.state_dim();
  cert.spectral_radius = second_moment_spectral_radius(model, chain, gains);
  cert.stable = cert.spectral_radius < kStabilityThreshold;
  return cert;
}

RestrictedObservationModel restrict_to_initial_observation(const ObservationModel& obs) {
  return RestrictedObservationModel{obs, obs.lambda()};
}

}  // namespace mjls
