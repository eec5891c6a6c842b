#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lls/analysis.hpp"
#include "lls/config.hpp"
#include "lls/simulation.hpp"

namespace lls {

struct ReplicaResult {
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  RunSummary summary;
};

// Defaults used by `lls experiment NAME` when no config file is given.
SimulationConfig default_experiment_config(std::string_view name);

// Seed every replica of an experiment derives from. Resolves "auto" once.
std::uint64_t experiment_base_seed(const SimulationConfig& config);

// ---- finite-size sweep ---------------------------------------------------

struct FiniteSizeRow {
  std::size_t agents = 0;
  std::vector<MemoryGroup> groups;
  std::vector<ReplicaResult> replicas;
  double mean_var_d_gamma = 0.0;
  double sd_var_d_gamma = 0.0;
  std::vector<double> final_group_wealth;  // replica 0
};

struct FiniteSizeReport {
  std::uint64_t base_seed = 0;
  std::vector<FiniteSizeRow> rows;
};

/// For every agent count: the base groups rescaled proportionally,
/// n_total = agents * n0, and `base.replicas` seeds. Var(d_gamma) is taken
/// over the post-burn-in series of each replica.
FiniteSizeReport experiment_finite_size(const SimulationConfig& base,
                                        std::span<const std::size_t> agent_counts,
                                        const std::optional<std::filesystem::path>& out_dir = {});

// ---- generator quality ---------------------------------------------------

struct LatticeCheck {
  std::size_t triples = 0;
  bool randu_identity_holds = false;
  // First triple index at which MT19937-64 output (top 31 bits) breaks
  // x[k+2] = 6 x[k+1] - 9 x[k] mod 2^31; empty if it never did.
  std::optional<std::size_t> mersenne_first_violation;
};

// Checks the RANDU identity on `draws` consecutive outputs of both
// generators seeded with `seed`.
LatticeCheck check_lattice_identity(std::uint64_t seed, std::size_t draws);

struct StatComparison {
  double mersenne_mean = 0.0;
  double mersenne_sd = 0.0;
  double randu_mean = 0.0;
  double randu_sd = 0.0;
  bool exceeds_spread() const noexcept;  // |randu - mersenne| > mersenne_sd
};

struct RngQualityReport {
  std::uint64_t base_seed = 0;
  std::vector<ReplicaResult> mersenne;
  std::vector<ReplicaResult> randu;
  StatComparison crash_count;
  StatComparison kurtosis;
  LatticeCheck lattice;
};

RngQualityReport experiment_rng_quality(const SimulationConfig& base,
                                        const std::optional<std::filesystem::path>& out_dir = {});

// ---- tolerance sweep -----------------------------------------------------

struct ToleranceRow {
  double xi = 0.0;
  std::vector<ReplicaResult> replicas;
  double mean_gamma = 0.0;        // replica mean of the time-mean average fraction
  double max_gamma = 0.0;         // largest average fraction seen in any replica
  double mean_kurtosis = 0.0;     // replica mean excess kurtosis of log returns
  std::vector<double> acf_log;    // replica mean, lags 0..max_lag
  std::vector<double> acf_abs;
  std::vector<QQPoint> qq;        // replica 0
  double mean_iterations = 0.0;   // per step
};

struct ToleranceReport {
  std::uint64_t base_seed = 0;
  std::vector<ToleranceRow> rows;
};

ToleranceReport experiment_tolerance_sweep(const SimulationConfig& base, std::span<const double> xis,
                                           const std::optional<std::filesystem::path>& out_dir = {});

} // namespace lls
