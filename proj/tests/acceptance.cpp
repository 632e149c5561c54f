// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance is pinned in code next to the check it gates.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <vector>

#include "mjls/config.hpp"
#include "mjls/lmi.hpp"
#include "mjls/sim.hpp"
#include "mjls/synth.hpp"
#include "oracles.hpp"

using namespace mjls;

namespace {

struct Criterion {
  const char* name;
  std::function<bool(std::string&)> run;
};

MjlsModel demo_model() {
  std::vector<Eigen::MatrixXd> A(3), B(3);
  A[0] = Eigen::MatrixXd{{-0.45, -0.3}, {1.2, 0.45}};
  A[1] = Eigen::MatrixXd{{-0.7, 0.7}, {0.2, 0.8}};
  A[2] = A[1];
  B[0] = Eigen::MatrixXd{{1.0}, {1.0}};
  B[1] = Eigen::MatrixXd{{1.0}, {0.0}};
  B[2] = Eigen::MatrixXd{{-1.0}, {0.0}};
  Eigen::MatrixXd P{{0.6, 0.2, 0.2}, {0.2, 0.6, 0.2}, {0.2, 0.2, 0.6}};
  return MjlsModel(std::move(A), std::move(B), validate_stochastic(P));
}

ObservationModel demo_obs() { return build_periodic_with_failures(4, 0.5, 4); }

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Synthesized demo gains, shared by criteria 3, 4 and 9.
const GainSchedule& demo_gains(bool& ok) {
  static bool ready = false, good = false;
  static GainSchedule gains = GainSchedule::zero(3, 4, 1, 2);
  if (!ready) {
    ready = true;
    const MjlsModel model = demo_model();
    const ObservationModel obs = demo_obs();
    const ExtendedChain chain = build_extended_chain(model, obs);
    const SdpSolution sol = solve_feasibility(assemble(model, chain));
    if (sol.status == SolveStatus::kFeasible) {
      gains = extract_gains(sol, LmiVariableLayout(chain.dims(), 2, 1));
      good = true;
    }
  }
  ok = good;
  return gains;
}

bool decay_below(const MjlsModel& model, const ObservationModel& obs, const GainSchedule& gains,
                 int s0, int sigma0, long long tau0, std::uint64_t seed, double* ratio) {
  SimConfig cfg;
  cfg.horizon = 50;
  cfg.num_paths = 100;
  cfg.x0 = Eigen::VectorXd{{1.0, 1.0}};
  cfg.r0 = 1;
  cfg.s0 = s0;
  cfg.sigma0 = sigma0;
  cfg.tau0 = tau0;
  cfg.seed = seed;
  const SimResult res = simulate_closed_loop(model, obs, gains, cfg);
  *ratio = res.mean_sq_norm.back() / res.mean_sq_norm.front();
  return *ratio < 1e-2;
}

bool criterion1_embedding_law(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const EmbeddingCheck check =
      validate_embedding(demo_model(), demo_obs(), 200000, /*seed=*/20260810,
                         /*tolerance=*/0.02, /*prob_floor=*/0.01, /*min_visits=*/100);
  const double secs = elapsed_s(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max |emp - pbar| = %.4f over %d entries (%d rows), %.2f s",
                check.max_abs_error, check.entries_compared, check.rows_compared, secs);
  detail = buf;
  return check.pass && secs < 10.0;
}

bool criterion2_stochasticity(std::string& detail) {
  std::mt19937_64 rng = make_rng(1001);
  double worst_row = 0.0, worst_marginal = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testing::uniform_int(rng, 1, 2);
    const int N = testing::uniform_int(rng, 1, 4);
    const int M = testing::uniform_int(rng, 1, 4);
    const int T = testing::uniform_int(rng, 1, 4);
    const MjlsModel model = testing::random_model(rng, n, 1, N, 0.3, 1.2);
    const ObservationModel obs = testing::random_obs(rng, M, T);
    const ExtendedChain chain = build_extended_chain(model, obs);
    const Eigen::MatrixXd& pbar = chain.pbar().entries();
    for (int row = 0; row < chain.size(); ++row) {
      worst_row = std::max(worst_row, std::abs(pbar.row(row).sum() - 1.0));
      const ExtendedState chi = chain.states()[static_cast<std::size_t>(row)];
      for (int a2 = 1; a2 <= N; ++a2) {
        for (int b2 = 1; b2 <= M; ++b2) {
          double sum = 0.0;
          for (int g2 = 1; g2 <= N; ++g2) {
            for (int d2 = 1; d2 <= T; ++d2) sum += chain.prob(chi, {a2, b2, g2, d2});
          }
          const double want = model.P().prob(chi.alpha, a2) * obs.Q().prob(chi.beta, b2);
          worst_marginal = std::max(worst_marginal, std::abs(sum - want));
        }
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "100 instances: worst row-sum dev %.2e, worst marginal dev %.2e", worst_row,
                worst_marginal);
  detail = buf;
  return worst_row <= 1e-12 && worst_marginal <= 1e-12;
}

bool criterion3_end_to_end(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const MjlsModel model = demo_model();
  const ObservationModel obs = demo_obs();
  const ExtendedChain chain = build_extended_chain(model, obs);
  if (chain.size() != 180) {
    detail = "extended space is not 180 states";
    return false;
  }
  const SdpSolution sol = solve_feasibility(assemble(model, chain));
  if (sol.status != SolveStatus::kFeasible) {
    detail = std::string("solver status ") + to_string(sol.status);
    return false;
  }
  const GainSchedule gains = extract_gains(sol, LmiVariableLayout(chain.dims(), 2, 1));
  const StabilityCertificate cert = certify_mss(model, chain, gains);
  const double secs = elapsed_s(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "feasible (margin %.3e), rho = %.6f, %.2f s", sol.margin,
                cert.spectral_radius, secs);
  detail = buf;
  return cert.stable && secs < 300.0;
}

bool criterion4_decay(std::string& detail) {
  bool ok = false;
  const GainSchedule& gains = demo_gains(ok);
  if (!ok) {
    detail = "synthesis failed";
    return false;
  }
  const MjlsModel model = demo_model();
  const ObservationModel obs = demo_obs();
  double worst = 0.0;
  int combos = 0;
  for (long long tau0 : {-1LL, -3LL}) {
    for (int sigma0 : {1, 2, 3}) {
      for (int s0 = 1; s0 <= 5; ++s0) {
        double ratio = 0.0;
        const std::uint64_t seed = 40000 + static_cast<std::uint64_t>(combos);
        if (!decay_below(model, obs, gains, s0, sigma0, tau0, seed, &ratio)) {
          char buf[160];
          std::snprintf(buf, sizeof(buf), "ratio %.3e at (tau0=%lld, sigma0=%d, s0=%d)", ratio,
                        tau0, sigma0, s0);
          detail = buf;
          return false;
        }
        worst = std::max(worst, ratio);
        ++combos;
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d initial sweeps, worst decay ratio %.3e < 1e-2", combos,
                worst);
  detail = buf;
  return true;
}

bool criterion5_soundness(std::string& detail) {
  std::mt19937_64 rng = make_rng(5005);
  int feasible = 0, certified = 0, attempts = 0;
  double worst_rho = 0.0;
  while (feasible < 50 && attempts < 400) {
    ++attempts;
    const int n = testing::uniform_int(rng, 1, 2);
    const int m = testing::uniform_int(rng, 1, 2);
    const int N = testing::uniform_int(rng, 1, 3);
    const int M = testing::uniform_int(rng, 1, 3);
    const int T = testing::uniform_int(rng, 1, 3);
    const MjlsModel model = testing::random_model(rng, n, m, N, 0.3, 1.1);
    const ObservationModel obs = testing::random_obs(rng, M, T);
    const ExtendedChain chain = build_extended_chain(model, obs);
    const SdpSolution sol = solve_feasibility(assemble(model, chain));
    if (sol.status != SolveStatus::kFeasible) continue;
    ++feasible;
    const GainSchedule gains = extract_gains(sol, LmiVariableLayout(chain.dims(), n, m));
    const StabilityCertificate cert = certify_mss(model, chain, gains);
    worst_rho = std::max(worst_rho, cert.spectral_radius);
    if (cert.stable) ++certified;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d/%d feasible instances certified, worst rho %.6f (%d draws)",
                certified, feasible, worst_rho, attempts);
  detail = buf;
  return feasible >= 50 && certified == feasible;
}

bool criterion6_gap_laws(std::string& detail) {
  // (a) attempt/failure chain with tau = 2, p = 0.5.
  const ObservationModel ex1 = build_periodic_with_failures(2, 0.5);
  const auto gaps = sample_gaps(ex1, 1, 100000, 6001);
  std::map<long long, double> freq;
  for (long long g : gaps) freq[g] += 1.0 / static_cast<double>(gaps.size());
  if (std::abs(freq[2] - 0.5) > 0.01 || std::abs(freq[4] - 0.25) > 0.01 ||
      std::abs(freq[6] - 0.125) > 0.01) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "attempt/failure law off: %.4f / %.4f / %.4f", freq[2],
                  freq[4], freq[6]);
    detail = buf;
    return false;
  }

  // (b) 20 random renewal distributions with support <= 6.
  std::mt19937_64 rng = make_rng(6006);
  double worst_atom = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int support = testing::uniform_int(rng, 1, 6);
    const std::vector<double> mu = testing::random_gap_distribution(rng, support);
    const ObservationModel obs = build_renewal(mu);
    const auto rg = sample_gaps(obs, 1, 100000, 6100 + static_cast<std::uint64_t>(trial));
    std::vector<double> emp(mu.size(), 0.0);
    for (long long g : rg) emp[static_cast<std::size_t>(g - 1)] += 1.0 / 100000.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      worst_atom = std::max(worst_atom, std::abs(emp[k] - mu[k]));
    }
  }
  if (worst_atom > 0.01) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "renewal atom deviation %.4f > 0.01", worst_atom);
    detail = buf;
    return false;
  }

  // (c) deterministic three-cycle observation times.
  const ObservationModel cyc =
      build_custom(Eigen::MatrixXd{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}, {1, 3});
  const auto times = sample_observation_times(cyc, 1, 9, 0);
  if (times != std::vector<long long>{0, 2, 3, 5, 6, 8, 9}) {
    detail = "three-cycle observation times wrong";
    return false;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "geometric law within 0.01; renewal atoms within %.4f; cycle times exact",
                worst_atom);
  detail = buf;
  return true;
}

bool criterion7_oracle_equivalence(std::string& detail) {
  std::mt19937_64 rng = make_rng(7007);
  double worst_sigma = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testing::uniform_int(rng, 1, 2);
    const int N = testing::uniform_int(rng, 1, 3);
    const int M = testing::uniform_int(rng, 1, 3);
    const int T = testing::uniform_int(rng, 1, 3);
    const MjlsModel model = testing::random_model(rng, n, 1, N, 0.3, 1.1);
    const ObservationModel obs = testing::random_obs(rng, M, T);
    const ExtendedChain chain = build_extended_chain(model, obs);
    const GainSchedule zero = GainSchedule::zero(N, T, 1, n);

    SimConfig cfg;
    cfg.horizon = 10;
    // |x(k)|^2 is heavy-tailed under random mode products; 4e4 >= 1e4 paths
    // keep the sample standard error itself reliable.
    cfg.num_paths = 40000;
    cfg.x0 = Eigen::VectorXd::Ones(n);
    cfg.r0 = testing::uniform_int(rng, 1, N);
    cfg.s0 = testing::uniform_int(rng, 1, M);
    cfg.sigma0 = testing::uniform_int(rng, 1, N);
    cfg.tau0 = -static_cast<long long>(testing::uniform_int(rng, 1, 3));
    cfg.seed = 7100 + static_cast<std::uint64_t>(trial);
    cfg.record_paths = true;
    const SimResult mc = simulate_closed_loop(model, obs, zero, cfg);
    const ExtendedState chi0 =
        initial_extended_state(obs, cfg.r0, cfg.s0, cfg.sigma0, cfg.tau0);
    const auto exact = second_moment_iterate(model, chain, zero, chi0, cfg.x0, cfg.horizon);

    for (long long k : {1LL, 5LL, 10LL}) {
      std::vector<double> samples;
      samples.reserve(mc.paths.size());
      for (const auto& path : mc.paths) samples.push_back(path[static_cast<std::size_t>(k)]);
      const auto stats = testing::mean_stderr(samples);
      const double err = std::abs(stats.mean - exact[static_cast<std::size_t>(k)]);
      const double guard = 1e-9 * std::max(1.0, exact[static_cast<std::size_t>(k)]);
      if (stats.stderr_ > 0.0) worst_sigma = std::max(worst_sigma, (err - guard) / stats.stderr_);
      if (err > 3.0 * stats.stderr_ + guard) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "trial %d, k=%lld: |mc - exact| = %.3e > 3 se = %.3e",
                      trial, k, err, 3.0 * stats.stderr_);
        detail = buf;
        return false;
      }
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "20 instances x {1,5,10}: worst deviation %.2f se", worst_sigma);
  detail = buf;
  return true;
}

bool criterion8_scalar_sanity(std::string& detail) {
  std::string rhos;
  for (double a : {0.5, 0.99, 1.0, 1.01, 2.0}) {
    std::vector<Eigen::MatrixXd> A{Eigen::MatrixXd{{a}}};
    std::vector<Eigen::MatrixXd> B{Eigen::MatrixXd{{0.0}}};
    const MjlsModel model(A, B, validate_stochastic(Eigen::MatrixXd{{1.0}}));
    const ObservationModel obs = build_custom(Eigen::MatrixXd{{1.0}}, {1}, 1);
    const ExtendedChain chain = build_extended_chain(model, obs);
    const StabilityCertificate cert = certify_mss(model, chain, GainSchedule::zero(1, 1, 1, 1));
    const bool want_stable = a < 1.0;  // a = 1.0 reports unstable under the strict threshold
    rhos += format_double(cert.spectral_radius) + " ";
    if (cert.stable != want_stable) {
      detail = "a = " + format_double(a) + " misclassified (rho " +
               format_double(cert.spectral_radius) + ")";
      return false;
    }
  }
  detail = "radii " + rhos + "classified correctly, 1.0 unstable";
  return true;
}

bool criterion9_initial_observation(std::string& detail) {
  bool ok = false;
  const GainSchedule& gains = demo_gains(ok);
  if (!ok) {
    detail = "synthesis failed";
    return false;
  }
  const MjlsModel model = demo_model();
  const ObservationModel obs = demo_obs();
  const RestrictedObservationModel restricted = restrict_to_initial_observation(obs);

  // Restricted family: s0 confined to Lambda (observation at k = 0).
  double worst_restricted = 0.0;
  for (int s0 : restricted.initial_states) {
    double ratio = 0.0;
    if (!decay_below(model, restricted.model, gains, s0, 2, -2, 9000, &ratio)) {
      detail = "restricted start s0=" + std::to_string(s0) + " did not decay";
      return false;
    }
    worst_restricted = std::max(worst_restricted, ratio);
  }
  // Unrestricted family: every s0 in <M>.
  double worst_free = 0.0;
  for (int s0 = 1; s0 <= obs.dim(); ++s0) {
    double ratio = 0.0;
    if (!decay_below(model, obs, gains, s0, 2, -2, 9100 + s0, &ratio)) {
      detail = "unrestricted start s0=" + std::to_string(s0) + " did not decay";
      return false;
    }
    worst_free = std::max(worst_free, ratio);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "decay ratios: restricted <= %.3e, unrestricted <= %.3e",
                worst_restricted, worst_free);
  detail = buf;
  return true;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"1 embedding law on the 180-state demo system", criterion1_embedding_law},
      {"2 stochasticity + marginal factorization (100 random instances)",
       criterion2_stochasticity},
      {"3 end-to-end synthesis on the demo system", criterion3_end_to_end},
      {"4 closed-loop decay across initialization sweeps", criterion4_decay},
      {"5 soundness: every feasible instance certifies stable", criterion5_soundness},
      {"6 observation gap laws (geometric, renewal, cycle)", criterion6_gap_laws},
      {"7 Monte Carlo vs exact second moment", criterion7_oracle_equivalence},
      {"8 scalar stability classification", criterion8_scalar_sanity},
      {"9 initial-time observation equivalence", criterion9_initial_observation},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %s%s%s\n", ok ? "PASS" : "FAIL", c.name,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
