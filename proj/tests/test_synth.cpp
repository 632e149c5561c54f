#include <doctest.h>

#include "mjls/synth.hpp"
#include "oracles.hpp"

using namespace mjls;

namespace {

// Hand-built "solution" carrying a chosen assignment.
SdpSolution fake_feasible(const LmiVariableLayout& layout) {
  SdpSolution sol;
  sol.status = SolveStatus::kFeasible;
  sol.margin = 1.0;
  sol.assignment = Eigen::VectorXd::Zero(layout.total());
  return sol;
}

MjlsModel scalar_model(double a) {
  std::vector<Eigen::MatrixXd> A{Eigen::MatrixXd{{a}}};
  std::vector<Eigen::MatrixXd> B{Eigen::MatrixXd{{0.0}}};
  return MjlsModel(A, B, validate_stochastic(Eigen::MatrixXd{{1.0}}));
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("extract_gains computes F G^-1 per pair") {
  const ExtendedDims dims{2, 1, 2};
  const LmiVariableLayout layout(dims, 1, 1);
  SdpSolution sol = fake_feasible(layout);
  for (int gamma = 1; gamma <= 2; ++gamma) {
    for (int delta = 1; delta <= 2; ++delta) {
      sol.assignment[layout.g_offset(gamma, delta)] = 2.0;
      sol.assignment[layout.f_offset(gamma, delta)] = gamma == 1 ? 1.0 : 0.0;
    }
  }
  const GainSchedule gains = extract_gains(sol, layout);
  CHECK(gains.K(1, 1)(0, 0) == 0.5);
  CHECK(gains.K(1, 2)(0, 0) == 0.5);
  CHECK(gains.K(2, 1)(0, 0) == 0.0);
}

TEST_CASE("extract_gains rejects non-feasible solutions and singular G") {
  const ExtendedDims dims{1, 1, 1};
  const LmiVariableLayout layout(dims, 1, 1);
  SdpSolution sol = fake_feasible(layout);
  sol.status = SolveStatus::kMarginTooSmall;
  CHECK_THROWS_AS(extract_gains(sol, layout), std::invalid_argument);
  sol.status = SolveStatus::kFeasible;  // G left at zero: singular
  CHECK_THROWS_AS(extract_gains(sol, layout), SingularGainError);
}

TEST_CASE("scalar single-state radius is a^2") {
  for (double a : {0.5, 1.1}) {
    const MjlsModel model = scalar_model(a);
    const ObservationModel obs = build_custom(Eigen::MatrixXd{{1.0}}, {1}, 1);
    const ExtendedChain chain = build_extended_chain(model, obs);
    const StabilityCertificate cert = certify_mss(model, chain, GainSchedule::zero(1, 1, 1, 1));
    CHECK(cert.spectral_radius == doctest::Approx(a * a).epsilon(1e-12));
    CHECK(cert.stable == (a < 1.0));
    CHECK(cert.operator_dim == 1);
  }
}

TEST_CASE("zero closed loop has radius zero") {
  std::vector<Eigen::MatrixXd> A{Eigen::MatrixXd::Zero(2, 2)};
  std::vector<Eigen::MatrixXd> B{Eigen::MatrixXd::Zero(2, 1)};
  const MjlsModel model(A, B, validate_stochastic(Eigen::MatrixXd{{1.0}}));
  const ObservationModel obs = build_custom(Eigen::MatrixXd{{0, 1}, {1, 0}}, {1}, 2);
  const ExtendedChain chain = build_extended_chain(model, obs);
  const StabilityCertificate cert = certify_mss(model, chain, GainSchedule::zero(1, 2, 1, 2));
  CHECK(cert.spectral_radius == 0.0);
  CHECK(cert.stable);
}

TEST_CASE("open-loop radius on the extended chain matches the mode-chain oracle") {
  std::mt19937_64 rng = make_rng(19);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = testing::uniform_int(rng, 1, 2);
    const int N = testing::uniform_int(rng, 1, 3);
    const MjlsModel model = testing::random_model(rng, n, 1, N, 0.3, 1.3);
    const ObservationModel obs = testing::random_obs(rng, testing::uniform_int(rng, 1, 3),
                                                     testing::uniform_int(rng, 1, 3));
    const ExtendedChain chain = build_extended_chain(model, obs);
    const GainSchedule zero = GainSchedule::zero(N, obs.clock_modulus(), 1, n);
    const double via_chain = certify_mss(model, chain, zero).spectral_radius;
    const double oracle = testing::open_loop_second_moment_rho(model);
    CHECK(via_chain == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("power iteration agrees with the dense eigensolve") {
  std::mt19937_64 rng = make_rng(29);
  for (int trial = 0; trial < 8; ++trial) {
    const MjlsModel model = testing::random_model(rng, 2, 1, 2, 0.3, 1.2);
    const ObservationModel obs = testing::random_obs(rng, 2, 2);
    const ExtendedChain chain = build_extended_chain(model, obs);
    GainSchedule gains = GainSchedule::zero(2, obs.clock_modulus(), 1, 2);
    const double dense = second_moment_spectral_radius(model, chain, gains);
    const double power = second_moment_spectral_radius(model, chain, gains, /*dense_limit=*/0);
    CHECK(power == doctest::Approx(dense).epsilon(1e-8));
  }
}

TEST_CASE("restrict_to_initial_observation confines initial states to Lambda") {
  const ObservationModel full = build_custom(Eigen::MatrixXd{{0.5, 0.5}, {0.5, 0.5}}, {1, 2});
  CHECK(restrict_to_initial_observation(full).initial_states == std::vector<int>{1, 2});
  const ObservationModel ex1 = build_periodic_with_failures(4, 0.5, 4);
  CHECK(restrict_to_initial_observation(ex1).initial_states == std::vector<int>{1});
  const ObservationModel cyc =
      build_custom(Eigen::MatrixXd{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}, {1, 3});
  CHECK(restrict_to_initial_observation(cyc).initial_states == std::vector<int>{1, 3});
}

TEST_CASE("feasible random instances always certify stable") {
  std::mt19937_64 rng = make_rng(37);
  int feasible_seen = 0;
  for (int trial = 0; trial < 15; ++trial) {
    const int n = testing::uniform_int(rng, 1, 2);
    const int m = testing::uniform_int(rng, 1, 2);
    const int N = testing::uniform_int(rng, 1, 3);
    const MjlsModel model = testing::random_model(rng, n, m, N, 0.3, 1.1);
    const ObservationModel obs = testing::random_obs(rng, testing::uniform_int(rng, 1, 3),
                                                     testing::uniform_int(rng, 1, 3));
    const ExtendedChain chain = build_extended_chain(model, obs);
    const SdpSolution sol = solve_feasibility(assemble(model, chain));
    if (sol.status != SolveStatus::kFeasible) continue;
    ++feasible_seen;
    const GainSchedule gains = extract_gains(sol, LmiVariableLayout(chain.dims(), n, m));
    CHECK(certify_mss(model, chain, gains).stable);
  }
  CHECK(feasible_seen >= 3);
}

}  // TEST_SUITE
