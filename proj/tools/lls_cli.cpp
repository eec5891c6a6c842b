// lls: command-line driver for the agent-based market simulator.
//
//   lls simulate --config FILE [--seed U64] [--out DIR]
//   lls experiment {finite-size|rng-quality|tolerance-sweep} [--config FILE] [--seed U64] [--out DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 numeric or clearance failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lls/config.hpp"
#include "lls/errors.hpp"
#include "lls/experiments.hpp"
#include "lls/simulation.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFailure = 3;

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out) {
  auto config = lls::load_config(config_path);
  if (seed) config.seed = seed;
  if (!out.empty()) config.output_dir = out;
  const std::uint64_t base = config.seed ? *config.seed : lls::entropy_seed();

  int status = 0;
  for (std::size_t k = 0; k < config.replicas; ++k) {
    auto run_config = config;
    std::filesystem::path dir = config.output_dir;
    if (config.replicas > 1) {
      run_config.seed = lls::replica_seed(base, k);
      run_config.replicas = 1;
      dir /= "replica_" + std::to_string(k);
    } else {
      run_config.seed = base;
    }
    run_config.output_dir = dir;
    const auto output = lls::run_simulation(run_config);
    lls::write_run(dir, run_config, output);
    if (output.meta.aborted()) {
      std::cerr << "run aborted: " << output.meta.abort_reason << "\n";
      status = kExitFailure;
    } else {
      std::cout << "wrote " << dir.string() << " (seed " << output.meta.seed << ", "
                << output.meta.completed_steps << " steps)\n";
    }
  }
  return status;
}

int run_experiment(const std::string& name, const std::string& config_path,
                   std::optional<std::uint64_t> seed, const std::string& out) {
  auto config = lls::default_experiment_config(name);
  if (!config_path.empty()) {
    const auto defaults = config;
    config = lls::load_config(config_path);
    if (config.agent_counts.empty()) config.agent_counts = defaults.agent_counts;
    if (config.xis.empty()) config.xis = defaults.xis;
  }
  if (seed) config.seed = seed;
  if (!out.empty()) config.output_dir = out;
  config.seed = lls::experiment_base_seed(config);
  const auto dir = config.output_dir;

  if (name == "finite-size") {
    const auto report = lls::experiment_finite_size(config, config.agent_counts, dir);
    for (const auto& row : report.rows) {
      std::printf("N=%zu  mean Var(d_gamma)=%.6g  sd=%.3g\n", row.agents, row.mean_var_d_gamma,
                  row.sd_var_d_gamma);
    }
  } else if (name == "rng-quality") {
    const auto report = lls::experiment_rng_quality(config, dir);
    std::printf("crash count  mersenne %.3g +- %.3g  randu %.3g +- %.3g\n",
                report.crash_count.mersenne_mean, report.crash_count.mersenne_sd,
                report.crash_count.randu_mean, report.crash_count.randu_sd);
    std::printf("kurtosis     mersenne %.3g +- %.3g  randu %.3g +- %.3g\n",
                report.kurtosis.mersenne_mean, report.kurtosis.mersenne_sd,
                report.kurtosis.randu_mean, report.kurtosis.randu_sd);
    std::printf("randu lattice identity holds: %s\n",
                report.lattice.randu_identity_holds ? "yes" : "no");
  } else {
    const auto report = lls::experiment_tolerance_sweep(config, config.xis, dir);
    for (const auto& row : report.rows) {
      std::printf("xi=%-6g mean gamma=%.4f  max gamma=%.4f  kurtosis=%.4g\n", row.xi,
                  row.mean_gamma, row.max_gamma, row.mean_kurtosis);
    }
  }
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"agent-based stock market simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;

  auto* simulate = app.add_subcommand("simulate", "run one simulation from a config file");
  simulate->add_option("--config", config_path, "config file")->required();
  simulate->add_option("--seed", seed, "override rng.seed");
  simulate->add_option("--out", out, "output directory");

  std::string experiment_name;
  auto* experiment = app.add_subcommand("experiment", "run a preset experiment");
  experiment->add_option("name", experiment_name, "experiment")
      ->required()
      ->check(CLI::IsMember({"finite-size", "rng-quality", "tolerance-sweep"}));
  experiment->add_option("--config", config_path, "base config file");
  experiment->add_option("--seed", seed, "override rng.seed");
  experiment->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(config_path, seed, out);
    return run_experiment(experiment_name, config_path, seed, out);
  } catch (const lls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lls::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lls::ClearanceError& e) {
    std::cerr << "clearance failure: " << e.what() << "\n";
    return kExitFailure;
  } catch (const lls::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitFailure;
  } catch (const lls::DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
