#include "mjls/sim.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "mjls/rng.hpp"

namespace mjls {
namespace {

void check_sim_config(const MjlsModel& model, const ObservationModel& obs, const SimConfig& cfg) {
  if (cfg.horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (cfg.num_paths < 1) throw std::invalid_argument("need at least one path");
  if (cfg.tau0 >= 0) throw std::invalid_argument("tau0 must be a negative integer");
  if (cfg.r0 < 1 || cfg.r0 > model.num_modes()) {
    throw std::out_of_range("r0 outside <" + std::to_string(model.num_modes()) + ">");
  }
  if (cfg.sigma0 < 1 || cfg.sigma0 > model.num_modes()) {
    throw std::out_of_range("sigma0 outside <" + std::to_string(model.num_modes()) + ">");
  }
  if (cfg.s0 < 0 || cfg.s0 > obs.dim()) {
    throw std::out_of_range("s0 outside <" + std::to_string(obs.dim()) + ">");
  }
  for (int s : cfg.initial_set) {
    if (s < 1 || s > obs.dim()) {
      throw std::out_of_range("initial set state outside <" + std::to_string(obs.dim()) + ">");
    }
  }
  if (cfg.x0.size() != model.state_dim()) {
    throw DimensionMismatchError("x0 has length " + std::to_string(cfg.x0.size()) +
                                 ", state dimension is " + std::to_string(model.state_dim()));
  }
}

int draw_initial_chain_state(const SimConfig& cfg, const ObservationModel& obs,
                             std::mt19937_64& rng) {
  if (cfg.s0 != 0) return cfg.s0;
  if (cfg.initial_set.empty()) {
    return static_cast<int>(next_below(rng, static_cast<std::uint64_t>(obs.dim()))) + 1;
  }
  return cfg.initial_set[next_below(rng, cfg.initial_set.size())];
}

// Shared per-path state of the observation bookkeeping.
struct PathState {
  int r;
  int s;
  int sigma;
  long long tau;

  void observe_if_due(const ObservationModel& obs, long long k) {
    if (obs.in_lambda(s)) {
      tau = k;
      sigma = r;
    }
  }
};

}  // namespace

SimResult simulate_closed_loop(const MjlsModel& model, const ObservationModel& obs,
                               const GainSchedule& gains, const SimConfig& cfg) {
  check_sim_config(model, obs, cfg);
  if (gains.num_modes() != model.num_modes() || gains.state_dim() != model.state_dim() ||
      gains.input_dim() != model.input_dim() ||
      gains.clock_modulus() != obs.clock_modulus()) {
    throw DimensionMismatchError("gain schedule does not match model/observation dimensions");
  }
  const int T = obs.clock_modulus();
  const std::size_t len = static_cast<std::size_t>(cfg.horizon) + 1;

  SimResult result;
  result.mean_sq_norm.assign(len, 0.0);
  result.observation_times.resize(static_cast<std::size_t>(cfg.num_paths));
  if (cfg.record_paths) result.paths.resize(static_cast<std::size_t>(cfg.num_paths));

  for (int path = 0; path < cfg.num_paths; ++path) {
    std::mt19937_64 rng =
        make_rng(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(path)));
    PathState st{cfg.r0, 0, cfg.sigma0, cfg.tau0};
    st.s = draw_initial_chain_state(cfg, obs, rng);
    st.observe_if_due(obs, 0);

    auto& obs_times = result.observation_times[static_cast<std::size_t>(path)];
    if (obs.in_lambda(st.s)) obs_times.push_back(0);

    std::vector<double> sq(len);
    Eigen::VectorXd x = cfg.x0;
    sq[0] = x.squaredNorm();
    for (long long k = 0; k < cfg.horizon; ++k) {
      const int delta = floor_mod(k + 1 - st.tau, T);
      x = (model.A(st.r) + model.B(st.r) * gains.K(st.sigma, delta)) * x;
      st.r = sample_next_state(model.P(), st.r, rng);
      st.s = sample_next_state(obs.Q(), st.s, rng);
      if (obs.in_lambda(st.s)) {
        st.tau = k + 1;
        st.sigma = st.r;
        obs_times.push_back(k + 1);
      }
      sq[static_cast<std::size_t>(k) + 1] = x.squaredNorm();
    }
    for (std::size_t i = 0; i < len; ++i) result.mean_sq_norm[i] += sq[i];
    if (cfg.record_paths) result.paths[static_cast<std::size_t>(path)] = std::move(sq);
  }
  for (double& v : result.mean_sq_norm) v /= cfg.num_paths;
  return result;
}

std::vector<ExtendedState> simulate_extended_tuple(const MjlsModel& model,
                                                   const ObservationModel& obs,
                                                   const SimConfig& cfg) {
  SimConfig checked = cfg;
  if (checked.x0.size() == 0) checked.x0 = Eigen::VectorXd::Zero(model.state_dim());
  check_sim_config(model, obs, checked);
  const int T = obs.clock_modulus();

  std::mt19937_64 rng = make_rng(derive_stream_seed(cfg.seed, 0));
  PathState st{cfg.r0, 0, cfg.sigma0, cfg.tau0};
  st.s = draw_initial_chain_state(cfg, obs, rng);
  st.observe_if_due(obs, 0);

  std::vector<ExtendedState> tuple;
  tuple.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
  for (long long k = 0;; ++k) {
    tuple.push_back({st.r, st.s, st.sigma, floor_mod(k + 1 - st.tau, T)});
    if (k == cfg.horizon) break;
    st.r = sample_next_state(model.P(), st.r, rng);
    st.s = sample_next_state(obs.Q(), st.s, rng);
    st.observe_if_due(obs, k + 1);
  }
  return tuple;
}

std::vector<double> second_moment_iterate(const MjlsModel& model, const ExtendedChain& chain,
                                          const GainSchedule& gains, const ExtendedState& chi0,
                                          const Eigen::VectorXd& x0, long long horizon) {
  if (x0.size() != model.state_dim()) {
    throw DimensionMismatchError("x0 does not match the model state dimension");
  }
  const int n = model.state_dim();
  const int size = chain.size();
  const Eigen::MatrixXd& pbar = chain.pbar().entries();

  std::vector<Eigen::MatrixXd> gamma;
  gamma.reserve(static_cast<std::size_t>(size));
  for (const ExtendedState& chi : chain.states()) {
    gamma.push_back(model.A(chi.alpha) + model.B(chi.alpha) * gains.K(chi.gamma, chi.delta));
  }

  std::vector<Eigen::MatrixXd> x(static_cast<std::size_t>(size), Eigen::MatrixXd::Zero(n, n));
  x[static_cast<std::size_t>(flat_index(chi0, chain.dims()) - 1)] = x0 * x0.transpose();

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  out.push_back(x0.squaredNorm());
  for (long long k = 1; k <= horizon; ++k) {
    std::vector<Eigen::MatrixXd> next(static_cast<std::size_t>(size),
                                      Eigen::MatrixXd::Zero(n, n));
    for (int from = 0; from < size; ++from) {
      if (x[static_cast<std::size_t>(from)].isZero(0.0)) continue;
      const Eigen::MatrixXd w = gamma[static_cast<std::size_t>(from)] *
                                x[static_cast<std::size_t>(from)] *
                                gamma[static_cast<std::size_t>(from)].transpose();
      for (int to = 0; to < size; ++to) {
        const double p = pbar(from, to);
        if (p != 0.0) next[static_cast<std::size_t>(to)] += p * w;
      }
    }
    x = std::move(next);
    double total = 0.0;
    for (const auto& m : x) total += m.trace();
    out.push_back(total);
  }
  return out;
}

EmbeddingCheck validate_embedding(const MjlsModel& model, const ObservationModel& obs,
                                  long long steps, std::uint64_t seed, double tolerance,
                                  double prob_floor, long long min_visits) {
  const ExtendedChain chain = build_extended_chain(model, obs);
  SimConfig cfg;
  cfg.horizon = steps;
  cfg.seed = seed;
  cfg.x0 = Eigen::VectorXd::Zero(model.state_dim());
  const std::vector<ExtendedState> tuple = simulate_extended_tuple(model, obs, cfg);

  const int size = chain.size();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t k = 0; k + 1 < tuple.size(); ++k) {
    const int from = flat_index(tuple[k], chain.dims()) - 1;
    const int to = flat_index(tuple[k + 1], chain.dims()) - 1;
    counts(from, to) += 1.0;
  }

  EmbeddingCheck check;
  check.steps = steps;
  const Eigen::MatrixXd& pbar = chain.pbar().entries();
  for (int i = 0; i < size; ++i) {
    const double row_total = counts.row(i).sum();
    if (row_total < static_cast<double>(min_visits)) continue;
    ++check.rows_compared;
    for (int j = 0; j < size; ++j) {
      if (pbar(i, j) < prob_floor) continue;
      ++check.entries_compared;
      check.max_abs_error =
          std::max(check.max_abs_error, std::abs(counts(i, j) / row_total - pbar(i, j)));
    }
  }
  check.pass = check.rows_compared > 0 && check.max_abs_error <= tolerance;
  return check;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_summary_csv(std::ostream& out, const SimResult& result,
                       const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "k,mean_sq_norm\n";
  for (std::size_t k = 0; k < result.mean_sq_norm.size(); ++k) {
    out << k << "," << format_double(result.mean_sq_norm[k]) << "\n";
  }
}

void write_paths_csv(std::ostream& out, const SimResult& result,
                     const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "path_id,k,sq_norm\n";
  for (std::size_t p = 0; p < result.paths.size(); ++p) {
    const auto& path = result.paths[p];
    for (std::size_t k = 0; k < path.size(); ++k) {
      out << p << "," << k << "," << format_double(path[k]) << "\n";
    }
  }
}

}  // namespace mjls
