#include "mjls/embedding.hpp"

#include <algorithm>
#include <deque>

namespace mjls {
namespace {

void check_component(int value, int bound, const char* name) {
  if (value < 1 || value > bound) {
    throw std::out_of_range(std::string(name) + " = " + std::to_string(value) + " outside <" +
                            std::to_string(bound) + ">");
  }
}

}  // namespace

int flat_index(const ExtendedState& state, const ExtendedDims& dims) {
  check_component(state.alpha, dims.num_modes, "alpha");
  check_component(state.beta, dims.obs_dim, "beta");
  check_component(state.gamma, dims.num_modes, "gamma");
  check_component(state.delta, dims.clock_modulus, "delta");
  const int idx = ((state.alpha - 1) * dims.obs_dim + (state.beta - 1)) * dims.num_modes +
                  (state.gamma - 1);
  return idx * dims.clock_modulus + (state.delta - 1) + 1;
}

ExtendedState state_at(int flat, const ExtendedDims& dims) {
  if (flat < 1 || flat > dims.size()) {
    throw std::out_of_range("flat index " + std::to_string(flat) + " outside <" +
                            std::to_string(dims.size()) + ">");
  }
  int rest = flat - 1;
  ExtendedState s;
  s.delta = rest % dims.clock_modulus + 1;
  rest /= dims.clock_modulus;
  s.gamma = rest % dims.num_modes + 1;
  rest /= dims.num_modes;
  s.beta = rest % dims.obs_dim + 1;
  rest /= dims.obs_dim;
  s.alpha = rest + 1;
  return s;
}

ExtendedChain::ExtendedChain(ExtendedDims dims, StochasticMatrix pbar)
    : dims_(dims), pbar_(std::move(pbar)) {
  if (pbar_.dim() != dims_.size()) {
    throw DimensionMismatchError("pbar has dim " + std::to_string(pbar_.dim()) +
                                 ", extended space has " + std::to_string(dims_.size()));
  }
  states_.reserve(static_cast<std::size_t>(dims_.size()));
  for (int flat = 1; flat <= dims_.size(); ++flat) states_.push_back(state_at(flat, dims_));
}

ExtendedChain build_extended_chain(const MjlsModel& model, const ObservationModel& obs) {
  const ExtendedDims dims{model.num_modes(), obs.dim(), obs.clock_modulus()};
  const int size = dims.size();
  const int N = dims.num_modes;
  const int M = dims.obs_dim;
  const int T = dims.clock_modulus;

  Eigen::MatrixXd pbar = Eigen::MatrixXd::Zero(size, size);
  for (int flat = 1; flat <= size; ++flat) {
    const ExtendedState chi = state_at(flat, dims);
    for (int alpha_next = 1; alpha_next <= N; ++alpha_next) {
      const double pa = model.P().prob(chi.alpha, alpha_next);
      if (pa == 0.0) continue;
      for (int beta_next = 1; beta_next <= M; ++beta_next) {
        const double qb = obs.Q().prob(chi.beta, beta_next);
        if (qb == 0.0) continue;
        // The whole mass p*q lands on the single successor fixed by whether
        // beta' triggers an observation.
        ExtendedState next;
        next.alpha = alpha_next;
        next.beta = beta_next;
        if (obs.in_lambda(beta_next)) {
          next.gamma = alpha_next;
          next.delta = 1;
        } else {
          next.gamma = chi.gamma;
          next.delta = ModResidue(chi.delta, T).next().value;
        }
        pbar(flat - 1, flat_index(next, dims) - 1) += pa * qb;
      }
    }
  }
  return ExtendedChain(dims, StochasticMatrix(std::move(pbar)));
}

std::vector<int> reachable_states(const ExtendedChain& chain,
                                  const std::vector<ExtendedState>& initial) {
  if (initial.empty()) {
    throw std::invalid_argument("reachable_states needs a nonempty initial set");
  }
  const int size = chain.size();
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  std::deque<int> frontier;
  for (const auto& s : initial) {
    const int flat = flat_index(s, chain.dims());
    if (!seen[static_cast<std::size_t>(flat - 1)]) {
      seen[static_cast<std::size_t>(flat - 1)] = 1;
      frontier.push_back(flat);
    }
  }
  const Eigen::MatrixXd& p = chain.pbar().entries();
  while (!frontier.empty()) {
    const int flat = frontier.front();
    frontier.pop_front();
    for (int j = 0; j < size; ++j) {
      if (p(flat - 1, j) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        frontier.push_back(j + 1);
      }
    }
  }
  std::vector<int> out;
  for (int flat = 1; flat <= size; ++flat) {
    if (seen[static_cast<std::size_t>(flat - 1)]) out.push_back(flat);
  }
  return out;
}

ExtendedState initial_extended_state(const ObservationModel& obs, int r0, int s0, int sigma0,
                                     long long tau0) {
  if (tau0 >= 0) throw std::invalid_argument("tau0 must be a negative integer");
  check_component(s0, obs.dim(), "s0");
  ExtendedState chi0;
  chi0.alpha = r0;
  chi0.beta = s0;
  if (obs.in_lambda(s0)) {
    chi0.gamma = r0;
    chi0.delta = 1;
  } else {
    chi0.gamma = sigma0;
    chi0.delta = floor_mod(1 - tau0, obs.clock_modulus());
  }
  return chi0;
}

}  // namespace mjls
