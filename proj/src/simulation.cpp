#include "lls/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "lls/analysis.hpp"
#include "lls/errors.hpp"

namespace lls {

std::vector<double> SimulationOutput::prices() const {
  std::vector<double> out;
  out.reserve(records.size() + 1);
  out.push_back(initial_price);
  for (const auto& r : records) out.push_back(r.S);
  return out;
}

std::vector<double> SimulationOutput::d_gamma_series(long burn_in) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.t > burn_in) out.push_back(r.d_gamma);
  }
  return out;
}

std::vector<double> SimulationOutput::mean_gamma_series(long burn_in) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.t > burn_in) out.push_back(r.mean_gamma);
  }
  return out;
}

std::vector<double> SimulationOutput::log_return_series(long burn_in) const {
  std::vector<double> out;
  double prev = initial_price;
  for (const auto& r : records) {
    if (r.t > burn_in) out.push_back(std::log(r.S) - std::log(prev));
    prev = r.S;
  }
  return out;
}

SimulationOutput run_simulation(const ModelParams& params, RngAlgorithm algorithm,
                                std::uint64_t seed, const std::string& preset) {
  const auto start = std::chrono::steady_clock::now();
  RngStream stream(algorithm, seed);
  SimulationOutput out;
  out.final_state = init_state(params, stream);
  out.initial_price = out.final_state.market.S;
  out.meta.preset = preset;
  out.meta.algorithm = algorithm;
  out.meta.seed = seed;
  out.records.reserve(static_cast<std::size_t>(params.steps));
  out.group_wealth.reserve(static_cast<std::size_t>(params.steps));

  try {
    for (long k = 0; k < params.steps; ++k) {
      const auto rec = simulation_step(out.final_state, params, stream);
      out.records.push_back(rec);
      out.group_wealth.push_back(group_wealth(out.final_state.agents, params.group_count()));
      out.meta.max_abs_residual = std::max(out.meta.max_abs_residual, std::abs(rec.residual));
      out.meta.max_abs_search_residual =
          std::max(out.meta.max_abs_search_residual, std::abs(rec.search_residual));
      out.meta.total_iterations += rec.iterations;
    }
  } catch (const ClearanceError& e) {
    out.meta.abort_kind = AbortKind::Clearance;
    out.meta.abort_reason = e.what();
  } catch (const NumericError& e) {
    out.meta.abort_kind = AbortKind::Numeric;
    out.meta.abort_reason = e.what();
  } catch (const DomainError& e) {
    out.meta.abort_kind = AbortKind::Numeric;
    out.meta.abort_reason = "step " + std::to_string(out.records.size() + 1) + ": " + e.what();
  }
  out.meta.completed_steps = static_cast<long>(out.records.size());
  out.meta.draws = stream.draws();
  out.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SimulationOutput run_simulation(const SimulationConfig& config) {
  const std::uint64_t seed = config.seed ? *config.seed : entropy_seed();
  return run_simulation(config.params, config.algorithm, seed, config.preset);
}

RunSummary summarize(const SimulationOutput& out, long burn_in, double crash_threshold) {
  RunSummary s;
  s.completed_steps = out.meta.completed_steps;
  s.final_price = out.records.empty() ? out.initial_price : out.records.back().S;

  const auto gammas = out.mean_gamma_series(burn_in);
  if (!gammas.empty()) {
    s.mean_gamma = mean(gammas);
    s.max_gamma = *std::max_element(gammas.begin(), gammas.end());
  }
  const auto returns = out.log_return_series(burn_in);
  s.crash_count = std::count_if(returns.begin(), returns.end(),
                                [&](double y) { return y < crash_threshold; });
  const auto stats = series_stats(returns);
  s.excess_kurtosis = stats.excess_kurtosis;

  const auto dg = out.d_gamma_series(burn_in);
  if (!dg.empty()) {
    s.mean_d_gamma = mean(dg);
    s.var_d_gamma = sample_variance(dg);
  }
  return s;
}

std::vector<CsvColumn> series_columns(const SimulationOutput& out, const RecordFlags& record) {
  std::vector<CsvColumn> cols{{"t", {}},          {"S", {}},          {"D", {}},
                              {"x", {}},          {"mean_gamma_star", {}}, {"mean_gamma", {}},
                              {"d_gamma", {}},    {"residual", {}},   {"search_residual", {}},
                              {"iterations", {}}};
  for (const auto& r : out.records) {
    cols[0].values.push_back(static_cast<double>(r.t));
    cols[1].values.push_back(r.S);
    cols[2].values.push_back(r.D);
    cols[3].values.push_back(r.x);
    cols[4].values.push_back(r.mean_gamma_star);
    cols[5].values.push_back(r.mean_gamma);
    cols[6].values.push_back(r.d_gamma);
    cols[7].values.push_back(r.residual);
    cols[8].values.push_back(r.search_residual);
    cols[9].values.push_back(static_cast<double>(r.iterations));
  }
  if (record.group_wealth) {
    std::size_t groups = 0;
    for (const auto& a : out.final_state.agents) groups = std::max(groups, a.group + 1);
    for (std::size_t g = 0; g < groups; ++g) {
      CsvColumn col{"wealth_g" + std::to_string(g), {}};
      col.values.reserve(out.group_wealth.size());
      for (const auto& row : out.group_wealth) col.values.push_back(row[g]);
      cols.push_back(std::move(col));
    }
  }
  return cols;
}

std::string render_summary(const RunSummary& s, const RunMetadata& meta) {
  std::ostringstream out;
  out << "completed_steps: " << s.completed_steps << "\n";
  out << "aborted: " << (meta.aborted() ? "true" : "false") << "\n";
  out << "final_price: " << format_double(s.final_price) << "\n";
  out << "mean_gamma: " << format_double(s.mean_gamma) << "\n";
  out << "max_gamma: " << format_double(s.max_gamma) << "\n";
  out << "crash_count: " << s.crash_count << "\n";
  out << "excess_kurtosis: "
      << (s.excess_kurtosis ? format_double(*s.excess_kurtosis) : std::string("nan")) << "\n";
  out << "mean_d_gamma: " << format_double(s.mean_d_gamma) << "\n";
  out << "var_d_gamma: " << format_double(s.var_d_gamma) << "\n";
  out << "max_abs_residual: " << format_double(meta.max_abs_residual) << "\n";
  out << "max_abs_search_residual: " << format_double(meta.max_abs_search_residual) << "\n";
  out << "total_iterations: " << meta.total_iterations << "\n";
  return out.str();
}

std::string render_metadata(const SimulationConfig& config, const RunMetadata& meta) {
  SimulationConfig resolved = config;
  resolved.seed = meta.seed;
  std::ostringstream out;
  out << "# run metadata; replay with: lls simulate --config metadata.txt\n";
  out << "# algorithm: " << to_string(meta.algorithm) << "\n";
  out << "# resolved_seed: " << meta.seed << "\n";
  out << "# draws: " << meta.draws << "\n";
  out << "# completed_steps: " << meta.completed_steps << "\n";
  out << "# wall_seconds: " << format_double(meta.wall_seconds) << "\n";
  out << "# max_abs_residual: " << format_double(meta.max_abs_residual) << "\n";
  if (meta.aborted()) {
    std::string reason = meta.abort_reason;
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    out << "# abort_reason: " << reason << "\n";
  }
  out << render_config(resolved);
  return out.str();
}

void write_run(const std::filesystem::path& dir, const SimulationConfig& config,
               const SimulationOutput& out) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  if (config.record.series) write_csv(series_columns(out, config.record), dir / "series.csv");
  const auto summary = summarize(out, config.resolved_burn_in(), config.crash_threshold);
  write_text(render_summary(summary, out.meta), dir / "summary.txt");
  write_text(render_metadata(config, out.meta), dir / "metadata.txt");
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

} // namespace lls
