#pragma once

#include <string>

#include "mjls/lmi.hpp"

namespace mjls {

enum class SolveStatus {
  kFeasible,
  kMarginTooSmall,
  kIterationLimit,
  kNumericalFailure,
};

const char* to_string(SolveStatus status);

struct SolveOptions {
  int max_iterations = 500;     // total Newton-step budget
  double margin_target = 1e-7;  // accept once margin > margin_target * (1 + max |v|)
  double tolerance = 1e-10;     // Newton decrement threshold for centering
};

struct SdpSolution {
  Eigen::VectorXd assignment;
  double margin = 0.0;  // smallest eigenvalue over all blocks at `assignment`
  SolveStatus status = SolveStatus::kNumericalFailure;
  int iterations = 0;
  std::string log;
};

/// Smallest eigenvalue over all blocks at assignment v, computed by dense
/// symmetric eigendecomposition. Used to re-verify solutions independently of
/// the solver's internal factorizations.
double verify_min_eigenvalue(const LmiProblem& problem, const Eigen::VectorXd& v);

/// Solver seam: an external conic solver can replace the built-in one behind
/// the same contract.
class FeasibilitySolver {
public:
  virtual ~FeasibilitySolver() = default;
  virtual SdpSolution solve(const LmiProblem& problem, const SolveOptions& options) const = 0;
};

/// Built-in interior-point method for the strict feasibility problem: maximize
/// the uniform margin t subject to Block(v) - t*I being positive semidefinite,
/// via log-det barriers with level advances on t and Newton centering in v.
/// Deterministic given options; never throws for solver-level failures, which
/// are reported through the status.
class BarrierSolver final : public FeasibilitySolver {
public:
  SdpSolution solve(const LmiProblem& problem, const SolveOptions& options) const override;
};

SdpSolution solve_feasibility(const LmiProblem& problem, const SolveOptions& options = {});

}  // namespace mjls
