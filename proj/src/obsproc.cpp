#include "mjls/obsproc.hpp"

#include <algorithm>
#include <cmath>

#include "mjls/rng.hpp"

namespace mjls {
namespace {

constexpr double kEdgeTol = 1e-12;       // entries above this count as graph edges
constexpr double kRenewalTol = 1e-9;     // tolerance of the hazard recursion

// Iterative Tarjan SCC over the positive-transition digraph.
// Returns the component id of each vertex (0-based vertices).
std::vector<int> strongly_connected_components(const Eigen::MatrixXd& q, int& num_components) {
  const int n = static_cast<int>(q.rows());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (q(i, j) > kEdgeTol) adj[i].push_back(j);
    }
  }

  std::vector<int> index(n, -1), lowlink(n, 0), component(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0;
  num_components = 0;

  struct Frame {
    int v;
    std::size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call_stack{{root, 0}};
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call_stack.empty()) {
      Frame& f = call_stack.back();
      if (f.child < adj[f.v].size()) {
        const int w = adj[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call_stack.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        if (lowlink[f.v] == index[f.v]) {
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            component[w] = num_components;
            if (w == f.v) break;
          }
          ++num_components;
        }
        const int v = f.v;
        call_stack.pop_back();
        if (!call_stack.empty()) {
          lowlink[call_stack.back().v] = std::min(lowlink[call_stack.back().v], lowlink[v]);
        }
      }
    }
  }
  return component;
}

}  // namespace

ObservationModel::ObservationModel(StochasticMatrix Q, std::vector<int> lambda, int clock_modulus)
    : Q_(std::move(Q)), lambda_(std::move(lambda)), clock_modulus_(clock_modulus) {
  if (lambda_.empty()) {
    throw LambdaNotRecurrentError("observation set Lambda must be nonempty");
  }
  std::sort(lambda_.begin(), lambda_.end());
  lambda_.erase(std::unique(lambda_.begin(), lambda_.end()), lambda_.end());
  if (lambda_.front() < 1 || lambda_.back() > Q_.dim()) {
    throw std::out_of_range("Lambda contains a state outside <" + std::to_string(Q_.dim()) + ">");
  }
  if (!check_recurrent(Q_, lambda_)) {
    throw LambdaNotRecurrentError("some closed communicating class of Q avoids Lambda");
  }
  if (clock_modulus_ == 0) clock_modulus_ = Q_.dim();
  if (clock_modulus_ < 1) {
    throw std::invalid_argument("clock modulus T must be positive");
  }
  lambda_mask_.assign(static_cast<std::size_t>(Q_.dim()), 0);
  for (int s : lambda_) lambda_mask_[static_cast<std::size_t>(s) - 1] = 1;
}

ObservationModel build_periodic_with_failures(int tau, double p, int clock_modulus) {
  if (tau < 1) throw std::invalid_argument("tau must be a positive integer");
  if (!(p > 0.0) || p > 1.0) {
    throw LambdaNotRecurrentError("failure chain needs 0 < p <= 1 for Lambda to be recurrent");
  }
  const int dim = tau + 1;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
  if (tau == 1) {
    // No countdown states: both arrival states decide immediately.
    q(0, 0) = p;
    q(0, 1) = 1.0 - p;
    q(1, 0) = p;
    q(1, 1) = 1.0 - p;
  } else {
    // States 1 (success) and 2 (failure) enter the countdown 3 -> 4 -> ... -> tau+1,
    // whose last state decides the next attempt: column 1 w.p. p, column 2 w.p. 1-p.
    q(0, 2) = 1.0;
    q(1, 2) = 1.0;
    for (int i = 3; i <= tau; ++i) q(i - 1, i) = 1.0;
    q(dim - 1, 0) = p;
    q(dim - 1, 1) = 1.0 - p;
  }
  return ObservationModel(StochasticMatrix(std::move(q)), {1}, clock_modulus);
}

ObservationModel build_renewal(const std::vector<double>& mu, int clock_modulus) {
  const int tau = static_cast<int>(mu.size());
  if (tau < 1) throw DegenerateDistributionError("gap distribution must have nonempty support");
  double total = 0.0;
  for (double p : mu) {
    if (!(p >= 0.0)) throw DegenerateDistributionError("gap probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > kRenewalTol) {
    throw DegenerateDistributionError("gap probabilities sum to " + std::to_string(total));
  }
  if (!(mu.back() > 0.0)) {
    throw DegenerateDistributionError("the last atom of the gap distribution must be positive");
  }

  // Hazard recursion: hazard_k = mu_k / (remaining tail mass before k).
  std::vector<double> hazard(mu.size());
  double survival = 1.0;  // prod_{l<k} (1 - hazard_l)
  for (int k = 0; k < tau; ++k) {
    if (survival <= kRenewalTol) {
      if (mu[k] <= kRenewalTol) {
        hazard[k] = 0.0;  // unreachable state, keep the chain shape
        continue;
      }
      throw DegenerateDistributionError("zero tail mass before atom " + std::to_string(k + 1));
    }
    double h = mu[k] / survival;
    if (h < -kRenewalTol || h > 1.0 + kRenewalTol) {
      throw DegenerateDistributionError("hazard " + std::to_string(h) + " at atom " +
                                        std::to_string(k + 1) + " outside [0,1]");
    }
    hazard[k] = std::clamp(h, 0.0, 1.0);
    survival *= 1.0 - hazard[k];
  }
  hazard[tau - 1] = 1.0;  // the last supported gap always fires

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(tau, tau);
  for (int k = 0; k < tau; ++k) {
    q(k, 0) = hazard[k];
    if (k + 1 < tau) q(k, k + 1) = 1.0 - hazard[k];
  }
  return ObservationModel(StochasticMatrix(std::move(q)), {1}, clock_modulus);
}

ObservationModel build_custom(const Eigen::MatrixXd& Q, std::vector<int> lambda,
                              int clock_modulus) {
  return ObservationModel(validate_stochastic(Q), std::move(lambda), clock_modulus);
}

bool check_recurrent(const StochasticMatrix& Q, const std::vector<int>& lambda) {
  const int n = Q.dim();
  int num_components = 0;
  const std::vector<int> component = strongly_connected_components(Q.entries(), num_components);

  // A component is closed iff no edge leaves it.
  std::vector<char> closed(static_cast<std::size_t>(num_components), 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (Q.entries()(i, j) > kEdgeTol && component[i] != component[j]) {
        closed[static_cast<std::size_t>(component[i])] = 0;
      }
    }
  }
  std::vector<char> has_lambda(static_cast<std::size_t>(num_components), 0);
  for (int s : lambda) has_lambda[static_cast<std::size_t>(component[s - 1])] = 1;

  for (int c = 0; c < num_components; ++c) {
    if (closed[static_cast<std::size_t>(c)] && !has_lambda[static_cast<std::size_t>(c)]) {
      return false;
    }
  }
  return true;
}

std::vector<long long> sample_observation_times(const ObservationModel& model, int s0,
                                                long long horizon, std::uint64_t seed) {
  if (s0 < 1 || s0 > model.dim()) {
    throw std::out_of_range("initial chain state outside <" + std::to_string(model.dim()) + ">");
  }
  std::mt19937_64 rng = make_rng(seed);
  std::vector<long long> times;
  int s = s0;
  for (long long k = 0; k <= horizon; ++k) {
    if (model.in_lambda(s)) times.push_back(k);
    if (k < horizon) s = sample_next_state(model.Q(), s, rng);
  }
  return times;
}

std::vector<long long> sample_gaps(const ObservationModel& model, int s0, std::size_t count,
                                   std::uint64_t seed) {
  if (s0 < 1 || s0 > model.dim()) {
    throw std::out_of_range("initial chain state outside <" + std::to_string(model.dim()) + ">");
  }
  std::mt19937_64 rng = make_rng(seed);
  std::vector<long long> gaps;
  gaps.reserve(count);
  int s = s0;
  long long k = 0;
  long long last = -1;
  if (model.in_lambda(s)) last = 0;
  while (gaps.size() < count) {
    s = sample_next_state(model.Q(), s, rng);
    ++k;
    if (model.in_lambda(s)) {
      if (last >= 0) gaps.push_back(k - last);
      last = k;
    }
  }
  return gaps;
}

}  // namespace mjls
