#pragma once

#include "mjls/sdpsolve.hpp"

namespace mjls {

/// Decision threshold on the second-moment spectral radius; borderline radii
/// are reported rather than silently classified.
inline constexpr double kStabilityThreshold = 1.0 - 1e-9;

struct StabilityCertificate {
  double spectral_radius = 0.0;
  bool stable = false;  // spectral_radius < kStabilityThreshold
  int operator_dim = 0; // |extended space| * n^2
};

/// Gains K_{gamma,delta} = F_{gamma,delta} G_{gamma,delta}^{-1} from a feasible
/// point. Throws SingularGainError if some G is numerically singular
/// (condition number above 1e12), which cannot occur for a genuinely feasible
/// point since G + G^T dominates a positive definite matrix.
GainSchedule extract_gains(const SdpSolution& solution, const LmiVariableLayout& layout);

/// Spectral radius of the closed-loop second-moment operator
/// X_chi <- sum_{chi'} pbar(chi',chi) Gamma_{chi'} X_{chi'} Gamma_{chi'}^T.
/// Dense eigensolve of the Kronecker representation up to operator dimension
/// `dense_limit`, shifted power iteration beyond it.
double second_moment_spectral_radius(const MjlsModel& model, const ExtendedChain& chain,
                                     const GainSchedule& gains, int dense_limit = 2000);

/// Decides mean square stability of the closed loop on the extended chain:
/// mean square stable iff the second-moment spectral radius is below one.
StabilityCertificate certify_mss(const MjlsModel& model, const ExtendedChain& chain,
                                 const GainSchedule& gains);

/// Observation model together with its admissible initial chain states.
struct RestrictedObservationModel {
  ObservationModel model;
  std::vector<int> initial_states;
};

/// Restricts initial chain states to Lambda, i.e. to runs with an observation
/// at time zero. Stabilization over this family is equivalent to
/// stabilization over unrestricted initial states when the first observation
/// time is uniformly bounded.
RestrictedObservationModel restrict_to_initial_observation(const ObservationModel& obs);

}  // namespace mjls
