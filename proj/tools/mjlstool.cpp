// Command-line front end: synthesize gains for a configured system, simulate
// the closed loop, validate the extended-chain transition law empirically, or
// report the observation-gap distribution.
//
// Exit codes: 0 success, 1 config error, 2 solver failure, 3 gains extracted
// but the stability certificate failed (flagged loudly; indicates a bug).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "mjls/config.hpp"
#include "mjls/lmi.hpp"
#include "mjls/sim.hpp"
#include "mjls/synth.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  long long horizon = 0;
  bool horizon_set = false;
  int paths = 0;
  bool paths_set = false;
};

mjls::SimConfig effective_sim(const mjls::ProblemConfig& cfg, const CommonArgs& args,
                              int state_dim) {
  mjls::SimConfig sim = cfg.sim;
  if (sim.x0.size() == 0) sim.x0 = Eigen::VectorXd::Ones(state_dim);
  if (args.seed_set) sim.seed = args.seed;
  if (args.horizon_set) sim.horizon = args.horizon;
  if (args.paths_set) sim.num_paths = args.paths;
  return sim;
}

int run_synthesize(const CommonArgs& args) {
  const mjls::ProblemConfig cfg = mjls::load_problem_config(args.config_path);
  const mjls::MjlsModel model = mjls::make_model(cfg);
  const mjls::ObservationModel obs = mjls::make_observation(cfg);
  const mjls::ExtendedChain chain = mjls::build_extended_chain(model, obs);
  const mjls::LmiProblem problem = mjls::assemble(model, chain);

  std::cout << "extended chain: " << chain.size() << " states; LMI: "
            << problem.blocks().size() << " blocks of size " << problem.block_dim() << ", "
            << problem.layout().total() << " scalar variables\n";

  const mjls::SdpSolution solution = mjls::solve_feasibility(problem, cfg.solver);
  fs::create_directories(args.out_dir);
  {
    std::ofstream log(fs::path(args.out_dir) / "solver.log");
    log << solution.log;
  }
  std::cout << "solver status: " << mjls::to_string(solution.status)
            << " (margin " << solution.margin << ", " << solution.iterations
            << " Newton steps)\n";
  if (solution.status != mjls::SolveStatus::kFeasible) {
    std::cerr << "LMI feasibility not attained; no gains produced\n";
    return 2;
  }

  const mjls::GainSchedule gains = mjls::extract_gains(solution, problem.layout());
  const std::uint64_t seed = args.seed_set ? args.seed : cfg.sim.seed;
  mjls::write_gains_json((fs::path(args.out_dir) / "gains.json").string(), gains,
                         cfg.config_hash, seed);

  const mjls::StabilityCertificate cert = mjls::certify_mss(model, chain, gains);
  mjls::CertificateFile cert_file;
  cert_file.status = mjls::to_string(solution.status);
  cert_file.margin = solution.margin;
  cert_file.iterations = solution.iterations;
  cert_file.spectral_radius = cert.spectral_radius;
  cert_file.stable = cert.stable;
  cert_file.operator_dim = cert.operator_dim;
  mjls::write_certificate_json((fs::path(args.out_dir) / "certificate.json").string(),
                               cert_file, cfg.config_hash, seed);

  std::cout << "gains: " << gains.num_modes() * gains.clock_modulus()
            << " matrices; second-moment spectral radius " << cert.spectral_radius << "\n";
  if (!cert.stable) {
    std::cerr << "BUG INDICATOR: LMI feasible but certificate reports spectral radius "
              << cert.spectral_radius << " >= 1; gains are NOT certified stabilizing\n";
    return 3;
  }
  std::cout << "certified mean square stable\n";
  return 0;
}

int run_simulate(const CommonArgs& args, const std::string& gains_path) {
  const mjls::ProblemConfig cfg = mjls::load_problem_config(args.config_path);
  const mjls::MjlsModel model = mjls::make_model(cfg);
  const mjls::ObservationModel obs = mjls::make_observation(cfg);
  const mjls::GainsFile gains_file = mjls::read_gains_json(gains_path);
  const mjls::GainSchedule& gains = gains_file.gains;

  if (gains.num_modes() != model.num_modes() || gains.state_dim() != model.state_dim() ||
      gains.input_dim() != model.input_dim() ||
      gains.clock_modulus() != obs.clock_modulus()) {
    std::cerr << "gains file does not match the configured system dimensions\n";
    return 1;
  }
  if (!gains_file.config_hash.empty() && gains_file.config_hash != cfg.config_hash) {
    std::cerr << "note: gains were synthesized from a config with hash "
              << gains_file.config_hash << ", current hash is " << cfg.config_hash << "\n";
  }

  mjls::SimConfig sim = effective_sim(cfg, args, model.state_dim());
  sim.record_paths = true;
  const mjls::SimResult result = mjls::simulate_closed_loop(model, obs, gains, sim);

  fs::create_directories(args.out_dir);
  const std::string meta = "config_hash=" + cfg.config_hash + " seed=" + std::to_string(sim.seed);
  {
    std::ofstream out(fs::path(args.out_dir) / "summary.csv");
    mjls::write_summary_csv(out, result, meta);
  }
  {
    std::ofstream out(fs::path(args.out_dir) / "paths.csv");
    mjls::write_paths_csv(out, result, meta);
  }
  const double ratio = result.mean_sq_norm.back() /
                       (result.mean_sq_norm.front() > 0.0 ? result.mean_sq_norm.front() : 1.0);
  std::cout << "decay ratio mean_sq_norm[" << sim.horizon << "]/mean_sq_norm[0] = "
            << mjls::format_double(ratio) << "\n";
  return 0;
}

int run_validate_embedding(const CommonArgs& args) {
  const mjls::ProblemConfig cfg = mjls::load_problem_config(args.config_path);
  const mjls::MjlsModel model = mjls::make_model(cfg);
  const mjls::ObservationModel obs = mjls::make_observation(cfg);

  const long long steps = args.horizon_set ? args.horizon : 200000;
  const std::uint64_t seed = args.seed_set ? args.seed : cfg.sim.seed;
  const mjls::EmbeddingCheck check = mjls::validate_embedding(model, obs, steps, seed);

  std::cout << "steps: " << check.steps << "\n"
            << "rows compared (>=100 visits): " << check.rows_compared << "\n"
            << "entries compared (pbar >= 0.01): " << check.entries_compared << "\n"
            << "max |empirical - analytic|: " << check.max_abs_error << "\n"
            << (check.pass ? "PASS" : "FAIL") << " (tolerance 0.02)\n";
  return check.pass ? 0 : 2;
}

int run_gaps(const CommonArgs& args, int s0, std::size_t count) {
  const mjls::ProblemConfig cfg = mjls::load_problem_config(args.config_path);
  const mjls::ObservationModel obs = mjls::make_observation(cfg);
  const std::uint64_t seed = args.seed_set ? args.seed : cfg.sim.seed;
  if (s0 == 0) s0 = obs.lambda().front();

  const std::vector<long long> gaps = mjls::sample_gaps(obs, s0, count, seed);
  std::map<long long, std::size_t> histogram;
  for (long long g : gaps) ++histogram[g];
  std::cout << "gap,count,freq\n";
  for (const auto& [gap, n] : histogram) {
    std::cout << gap << "," << n << ","
              << mjls::format_double(static_cast<double>(n) / static_cast<double>(gaps.size()))
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gain synthesis for Markov jump linear systems under randomized observations"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string gains_path = "gains.json";
  int gaps_s0 = 0;
  std::size_t gaps_count = 100000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", args.config_path, "problem config (JSON)")->required();
    cmd->add_option("--out-dir", args.out_dir, "artifact output directory");
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--horizon", args.horizon, "override the horizon / step count")
        ->each([&](const std::string&) { args.horizon_set = true; });
    cmd->add_option("--paths", args.paths, "override the number of sample paths")
        ->each([&](const std::string&) { args.paths_set = true; });
  };

  CLI::App* synth = app.add_subcommand("synthesize", "solve the LMIs, emit gains + certificate");
  add_common(synth);

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo closed-loop simulation to CSV");
  add_common(sim);
  sim->add_option("--gains", gains_path, "gains file from synthesize");

  CLI::App* val = app.add_subcommand("validate-embedding",
                                     "compare empirical tuple transitions with the analytic law");
  add_common(val);

  CLI::App* gaps = app.add_subcommand("gaps", "empirical observation-gap distribution");
  add_common(gaps);
  gaps->add_option("--s0", gaps_s0, "initial chain state (default: first state of Lambda)");
  gaps->add_option("--count", gaps_count, "number of gaps to sample");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synthesize(args);
    if (sim->parsed()) return run_simulate(args, gains_path);
    if (val->parsed()) return run_validate_embedding(args);
    if (gaps->parsed()) return run_gaps(args, gaps_s0, gaps_count);
  } catch (const mjls::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
