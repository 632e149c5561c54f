#pragma once

#include <vector>

#include "mjls/model.hpp"
#include "mjls/obsproc.hpp"

namespace mjls {

/// One state of the extended chain: plant mode, observation-chain state, last
/// observed mode, scheduling clock. All components one-based.
struct ExtendedState {
  int alpha;
  int beta;
  int gamma;
  int delta;

  friend bool operator==(const ExtendedState&, const ExtendedState&) = default;
};

struct ExtendedDims {
  int num_modes;       // N
  int obs_dim;         // M
  int clock_modulus;   // T

  int size() const { return num_modes * obs_dim * num_modes * clock_modulus; }
};

/// Lexicographic bijection (alpha, beta, gamma, delta) -> {1,...,N*M*N*T},
/// delta fastest-varying.
int flat_index(const ExtendedState& state, const ExtendedDims& dims);

/// Inverse of flat_index.
ExtendedState state_at(int flat, const ExtendedDims& dims);

/// The extended chain over <N> x <M> x <N> x <T>. The embedded tuple
/// (r(k), s(k), sigma(k), clock(k)) is a time-homogeneous Markov chain with
/// this transition matrix: mass p_{a,a'} q_{b,b'} goes to exactly one
/// successor (gamma', delta') per (alpha', beta') -- (alpha', 1) on an
/// observation (beta' in Lambda), (gamma, clock+1 wrapped) otherwise.
class ExtendedChain {
public:
  ExtendedChain(ExtendedDims dims, StochasticMatrix pbar);

  const ExtendedDims& dims() const { return dims_; }
  int size() const { return pbar_.dim(); }
  const StochasticMatrix& pbar() const { return pbar_; }

  /// Transition probability between extended states.
  double prob(const ExtendedState& from, const ExtendedState& to) const {
    return pbar_.prob(flat_index(from, dims_), flat_index(to, dims_));
  }

  /// states()[i] is the state with flat index i+1.
  const std::vector<ExtendedState>& states() const { return states_; }

private:
  ExtendedDims dims_;
  StochasticMatrix pbar_;
  std::vector<ExtendedState> states_;
};

ExtendedChain build_extended_chain(const MjlsModel& model, const ObservationModel& obs);

/// Forward-reachable flat indices (one-based, sorted) under positive-probability
/// transitions, including the initial set itself.
std::vector<int> reachable_states(const ExtendedChain& chain,
                                  const std::vector<ExtendedState>& initial);

/// Extended state occupied at k = 0 for initial data (r0, s0, sigma0, tau0).
/// If s0 is in Lambda an observation happens at time 0, so the last observed
/// mode is r0 and the clock starts at 1; otherwise the clock is 1-tau0 wrapped.
ExtendedState initial_extended_state(const ObservationModel& obs, int r0, int s0, int sigma0,
                                     long long tau0);

}  // namespace mjls
