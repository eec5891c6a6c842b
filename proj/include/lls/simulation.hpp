#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lls/clearance.hpp"
#include "lls/config.hpp"
#include "lls/csv.hpp"
#include "lls/model.hpp"
#include "lls/rng.hpp"

namespace lls {

enum class AbortKind { None, Clearance, Numeric };

struct RunMetadata {
  std::string preset;
  RngAlgorithm algorithm = RngAlgorithm::MersenneHQ;
  std::uint64_t seed = 0;
  std::uint64_t draws = 0;
  double wall_seconds = 0.0;
  long completed_steps = 0;
  double max_abs_residual = 0.0;
  double max_abs_search_residual = 0.0;
  long total_iterations = 0;
  AbortKind abort_kind = AbortKind::None;
  std::string abort_reason;

  bool aborted() const noexcept { return abort_kind != AbortKind::None; }
};

struct SimulationOutput {
  std::vector<StepRecord> records;
  std::vector<std::vector<double>> group_wealth;  // [step][group]
  SimulationState final_state;
  RunMetadata meta;

  // S0 followed by the price after every completed step.
  std::vector<double> prices() const;
  std::vector<double> d_gamma_series(long burn_in) const;
  std::vector<double> mean_gamma_series(long burn_in) const;
  // Log returns of steps after the burn-in.
  std::vector<double> log_return_series(long burn_in) const;
  double initial_price = 0.0;
};

/// init_state followed by params.steps calls of simulation_step. A
/// clearance or numeric failure ends the run early; the partial output is
/// returned with meta.abort_kind set.
SimulationOutput run_simulation(const ModelParams& params, RngAlgorithm algorithm,
                                std::uint64_t seed, const std::string& preset = "");

// Uses config.seed, or a fresh entropy seed when it is unset.
SimulationOutput run_simulation(const SimulationConfig& config);

struct RunSummary {
  long completed_steps = 0;
  double final_price = 0.0;
  double mean_gamma = 0.0;     // time mean of the average fraction, after burn-in
  double max_gamma = 0.0;
  long crash_count = 0;        // log returns below the crash threshold
  std::optional<double> excess_kurtosis;
  double mean_d_gamma = 0.0;
  double var_d_gamma = 0.0;
};

RunSummary summarize(const SimulationOutput& out, long burn_in, double crash_threshold);

std::vector<CsvColumn> series_columns(const SimulationOutput& out, const RecordFlags& record);

std::string render_summary(const RunSummary& summary, const RunMetadata& meta);

// Replayable config text with the resolved seed plus commented run facts.
std::string render_metadata(const SimulationConfig& config, const RunMetadata& meta);

// series.csv (when enabled), summary.txt and metadata.txt under `dir`.
void write_run(const std::filesystem::path& dir, const SimulationConfig& config,
               const SimulationOutput& out);

// Runs fn(0) .. fn(n - 1) on a small thread pool. Each call must only touch
// its own slot of any shared output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace lls
