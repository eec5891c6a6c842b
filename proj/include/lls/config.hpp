#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lls/model.hpp"
#include "lls/rng.hpp"

namespace lls {

struct RecordFlags {
  bool series = true;        // per-step series.csv
  bool group_wealth = true;  // per-group wealth columns in series.csv
};

struct SimulationConfig {
  std::string preset = "lls-basic";
  ModelParams params = preset_basic();
  RngAlgorithm algorithm = RngAlgorithm::MersenneHQ;
  std::optional<std::uint64_t> seed;  // empty: resolve from entropy at run time
  std::filesystem::path output_dir = "out";
  std::size_t replicas = 1;
  std::optional<long> burn_in;        // empty: max memory span
  double crash_threshold = -0.1;      // log return below this counts as a crash
  RecordFlags record;

  // sweep settings, used by the experiment commands
  std::vector<std::size_t> agent_counts;
  std::vector<double> xis;
  std::size_t max_lag = 50;

  long resolved_burn_in() const;
};

/// Parses line-oriented `key = value` text with optional `[section]`
/// headers; a key inside a section is read as `section.key`. Comments
/// start with `#` or `;`.
///
/// `preset = lls-basic | lls-3groups | none` selects the starting values
/// and is applied before any other key regardless of its position. With
/// `none` every model key must be given. Changing `model.agents` without
/// `model.memory` rescales the preset groups proportionally; `model.n_total`
/// defaults to agents * n0.
///
/// Unknown keys, malformed values and violated parameter ranges throw
/// ConfigError carrying the line number.
SimulationConfig parse_config(std::string_view text);

SimulationConfig load_config(const std::filesystem::path& path);

// Config text for the named preset alone.
SimulationConfig preset_config(std::string_view preset);

// Renders every key explicitly; parse_config(render_config(c)) == c up to
// the output directory.
std::string render_config(const SimulationConfig& config);

// "%.17g"
std::string format_double(double value);

} // namespace lls
