#include "mjls/sdpsolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mjls {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kMarginTooSmall: return "margin_too_small";
    case SolveStatus::kIterationLimit: return "iteration_limit";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

double verify_min_eigenvalue(const LmiProblem& problem, const Eigen::VectorXd& v) {
  double min_eig = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (const auto& block : problem.blocks()) {
    es.compute(evaluate_block(block, v), Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  return min_eig;
}

namespace {

constexpr double kLevelAdvance = 0.9;   // fraction of the (margin - level) gap taken per round
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr int kMaxInnerSteps = 50;
constexpr int kStallRounds = 3;
constexpr double kRescaleAt = 1e8;      // homogeneous problem: renormalize runaway iterates

double scale_of(const Eigen::VectorXd& v) {
  return 1.0 + (v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0);
}

// Barrier value sum_b -log det(Block_b(v) - t I), or +inf when any block
// leaves the PD cone. Cholesky factors are kept for the caller.
bool barrier_value(const LmiProblem& problem, const Eigen::VectorXd& v, double t,
                   std::vector<Eigen::LLT<Eigen::MatrixXd>>& factors, double* psi) {
  const int bd = problem.block_dim();
  double total = 0.0;
  factors.resize(problem.blocks().size());
  for (std::size_t b = 0; b < problem.blocks().size(); ++b) {
    Eigen::MatrixXd x = evaluate_block(problem.blocks()[b], v);
    x.diagonal().array() -= t;
    factors[b].compute(x);
    if (factors[b].info() != Eigen::Success) return false;
    const auto& l = factors[b].matrixLLT();
    double logdet = 0.0;
    for (int i = 0; i < bd; ++i) {
      const double d = l(i, i);
      if (!(d > 0.0)) return false;
      logdet += std::log(d);
    }
    total -= 2.0 * logdet;
  }
  *psi = total;
  return true;
}

}  // namespace

SdpSolution BarrierSolver::solve(const LmiProblem& problem, const SolveOptions& options) const {
  const LmiVariableLayout& layout = problem.layout();
  const int num_vars = layout.total();
  const int bd = problem.block_dim();
  const int n = layout.state_dim();
  std::ostringstream log;

  SdpSolution sol;
  sol.assignment = Eigen::VectorXd::Zero(num_vars);

  if (problem.blocks().empty()) {
    sol.status = SolveStatus::kFeasible;
    sol.margin = std::numeric_limits<double>::infinity();
    sol.log = "no blocks; vacuously feasible\n";
    return sol;
  }

  // Start from R = I, G = I, F = 0.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(num_vars);
  for (int flat = 1; flat <= layout.dims().size(); ++flat) {
    for (int i = 0; i < n; ++i) v[layout.r_entry(flat, i, i)] = 1.0;
  }
  for (int gamma = 1; gamma <= layout.dims().num_modes; ++gamma) {
    for (int delta = 1; delta <= layout.dims().clock_modulus; ++delta) {
      for (int i = 0; i < n; ++i) v[layout.g_offset(gamma, delta) + i * n + i] = 1.0;
    }
  }

  double margin = verify_min_eigenvalue(problem, v);
  double level = margin - 1.0;  // keeps every Block - level*I strictly PD
  Eigen::VectorXd best_v = v;
  double best_margin = margin;

  Eigen::VectorXd grad(num_vars);
  Eigen::MatrixXd hess(num_vars, num_vars);
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors;
  Eigen::MatrixXd ybuf;  // one flattened L^-1 S L^-T per active term
  int newton_steps = 0;
  int stall_rounds = 0;
  SolveStatus status = SolveStatus::kIterationLimit;

  for (int round = 0;; ++round) {
    if (margin > options.margin_target * scale_of(v)) {
      status = SolveStatus::kFeasible;
      break;
    }
    if (newton_steps >= options.max_iterations) {
      status = SolveStatus::kIterationLimit;
      break;
    }

    level += kLevelAdvance * (margin - level);

    // Newton centering of psi(v) = sum_b -log det(Block_b(v) - level*I).
    double psi = 0.0;
    bool failed = false;
    int inner_used = 0;
    for (int inner = 0; inner < kMaxInnerSteps && newton_steps < options.max_iterations; ++inner) {
      if (!barrier_value(problem, v, level, factors, &psi)) {
        failed = true;  // interior-point invariant broken
        break;
      }
      ++newton_steps;
      ++inner_used;

      grad.setZero();
      hess.setZero();
      for (std::size_t b = 0; b < problem.blocks().size(); ++b) {
        const auto& terms = problem.blocks()[b].terms;
        const int nt = static_cast<int>(terms.size());
        const auto& l = factors[b].matrixL();
        ybuf.resize(nt, bd * bd);
        for (int k = 0; k < nt; ++k) {
          // Y = L^-1 S L^-T; symmetric since S is.
          Eigen::MatrixXd z = l.solve(terms[static_cast<std::size_t>(k)].coeff);
          Eigen::MatrixXd y = l.solve(z.transpose());
          ybuf.row(k) = Eigen::Map<const Eigen::VectorXd>(y.data(), bd * bd);
          grad[terms[static_cast<std::size_t>(k)].var] -= y.trace();
        }
        const Eigen::MatrixXd gram = ybuf * ybuf.transpose();
        for (int k = 0; k < nt; ++k) {
          const int vk = terms[static_cast<std::size_t>(k)].var;
          for (int m2 = 0; m2 < nt; ++m2) {
            hess(vk, terms[static_cast<std::size_t>(m2)].var) += gram(k, m2);
          }
        }
      }

      Eigen::LDLT<Eigen::MatrixXd> kkt(hess);
      Eigen::VectorXd dir = kkt.solve(-grad);
      double decrement = -grad.dot(dir);
      if (!dir.allFinite() || decrement < 0.0) {
        // Singular KKT system: regularize the diagonal once.
        hess.diagonal().array() += 1e-12;
        kkt.compute(hess);
        dir = kkt.solve(-grad);
        decrement = -grad.dot(dir);
        if (!dir.allFinite() || !std::isfinite(decrement) ||
            decrement < -1e-9 * (1.0 + std::abs(psi))) {
          failed = true;
          break;
        }
        decrement = std::max(decrement, 0.0);
      }
      if (0.5 * decrement <= options.tolerance) break;  // centered

      double alpha = 1.0;
      bool accepted = false;
      std::vector<Eigen::LLT<Eigen::MatrixXd>> trial_factors;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        const Eigen::VectorXd v_try = v + alpha * dir;
        double psi_try = 0.0;
        if (barrier_value(problem, v_try, level, trial_factors, &psi_try) &&
            psi_try <= psi - kArmijo * alpha * decrement) {
          v = v_try;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // no further progress at this level
    }
    if (failed) {
      status = SolveStatus::kNumericalFailure;
      break;
    }

    const double new_margin = verify_min_eigenvalue(problem, v);
    if (new_margin - margin <= 1e-12 + 1e-9 * std::abs(margin)) {
      ++stall_rounds;
    } else {
      stall_rounds = 0;
    }
    margin = new_margin;
    if (margin > best_margin) {
      best_margin = margin;
      best_v = v;
    }
    log << "round " << round << ": newton=" << inner_used << " level=" << level
        << " margin=" << margin << " scale=" << scale_of(v) << "\n";

    if (stall_rounds >= kStallRounds) {
      status = margin > options.margin_target * scale_of(v) ? SolveStatus::kFeasible
                                                            : SolveStatus::kMarginTooSmall;
      break;
    }

    // The feasible set is a cone; renormalize runaway iterates (exact for the
    // barrier geometry: Block(v/c) - (t/c) I = (Block(v) - t I)/c).
    const double magnitude = v.cwiseAbs().maxCoeff();
    if (magnitude > kRescaleAt) {
      v /= magnitude;
      level /= magnitude;
      margin /= magnitude;
    }
  }

  // Report the accepted point (current v on success, best seen otherwise) and
  // re-verify its margin by dense eigendecomposition.
  const Eigen::VectorXd& final_v = (status == SolveStatus::kFeasible) ? v : best_v;
  sol.assignment = final_v;
  sol.margin = verify_min_eigenvalue(problem, final_v);
  sol.iterations = newton_steps;
  if (status == SolveStatus::kFeasible &&
      !(sol.margin > options.margin_target * scale_of(final_v))) {
    status = SolveStatus::kMarginTooSmall;  // verification veto; should not happen
  }
  sol.status = status;
  log << "status=" << to_string(status) << " margin=" << sol.margin
      << " newton_steps=" << newton_steps << "\n";
  sol.log = log.str();
  return sol;
}

SdpSolution solve_feasibility(const LmiProblem& problem, const SolveOptions& options) {
  return BarrierSolver().solve(problem, options);
}

}  // namespace mjls
