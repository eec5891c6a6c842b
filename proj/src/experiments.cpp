#include "lls/experiments.hpp"

#include <cmath>
#include <sstream>

#include "lls/csv.hpp"
#include "lls/errors.hpp"

namespace lls {

namespace fs = std::filesystem;

SimulationConfig default_experiment_config(std::string_view name) {
  if (name == "finite-size") {
    auto c = preset_config("lls-3groups");
    c.params.steps = 2000;
    c.replicas = 10;
    c.agent_counts = {200, 500, 1000};
    c.record.series = true;
    return c;
  }
  if (name == "rng-quality") {
    auto c = preset_config("lls-basic");
    c.params.sigma_gamma = 0.01;
    c.replicas = 10;
    return c;
  }
  if (name == "tolerance-sweep") {
    auto c = preset_config("lls-basic");
    c.params.agents = 200;
    c.params.memory_groups = scale_groups(c.params.memory_groups, 200);
    c.params.n_total = 200 * c.params.n0_per_agent;
    c.params.clearance_mode = ClearanceMode::Iterative;
    c.replicas = 10;
    c.xis = {0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
    return c;
  }
  throw ConfigError(0, "unknown experiment '" + std::string(name) +
                           "' (expected finite-size, rng-quality or tolerance-sweep)");
}

std::uint64_t experiment_base_seed(const SimulationConfig& config) {
  return config.seed ? *config.seed : entropy_seed();
}

namespace {

double sd_of(const std::vector<double>& v) {
  return v.size() < 2 ? 0.0 : std::sqrt(sample_variance(v));
}

// Runs one replica and turns an aborted run into the matching exception.
SimulationOutput run_replica(const ModelParams& params, RngAlgorithm algorithm, std::uint64_t seed,
                             const std::string& preset, const std::string& label) {
  auto out = run_simulation(params, algorithm, seed, preset);
  if (out.meta.abort_kind == AbortKind::Clearance) {
    throw ClearanceError(label + " (seed " + std::to_string(seed) + "): " + out.meta.abort_reason);
  }
  if (out.meta.abort_kind == AbortKind::Numeric) {
    throw NumericError(out.meta.completed_steps + 1,
                       label + " (seed " + std::to_string(seed) + "): " + out.meta.abort_reason);
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string experiment_metadata(const SimulationConfig& base, std::uint64_t seed,
                                std::string_view name) {
  SimulationConfig resolved = base;
  resolved.seed = seed;
  std::ostringstream out;
  out << "# experiment: " << name << "\n";
  out << "# replay with: lls experiment " << name << " --config metadata.txt\n";
  out << "# replica k uses seed splitmix64(base + k)\n";
  for (std::size_t k = 0; k < base.replicas; ++k) {
    out << "# replica " << k << " seed: " << replica_seed(seed, k) << "\n";
  }
  out << render_config(resolved);
  return out.str();
}

} // namespace

FiniteSizeReport experiment_finite_size(const SimulationConfig& base,
                                        std::span<const std::size_t> agent_counts,
                                        const std::optional<fs::path>& out_dir) {
  if (agent_counts.empty()) throw ParameterError("finite-size sweep needs at least one agent count");
  FiniteSizeReport report;
  report.base_seed = experiment_base_seed(base);
  const long burn_in = base.resolved_burn_in();

  struct Job {
    std::size_t row;
    std::size_t replica;
  };
  std::vector<Job> jobs;
  std::vector<ModelParams> row_params;
  for (std::size_t r = 0; r < agent_counts.size(); ++r) {
    ModelParams p = base.params;
    p.agents = agent_counts[r];
    p.memory_groups = scale_groups(base.params.memory_groups, p.agents);
    p.n_total = static_cast<double>(p.agents) * p.n0_per_agent;
    validate(p);
    row_params.push_back(p);
    FiniteSizeRow row;
    row.agents = p.agents;
    row.groups = p.memory_groups;
    row.replicas.resize(base.replicas);
    report.rows.push_back(std::move(row));
    for (std::size_t k = 0; k < base.replicas; ++k) jobs.push_back({r, k});
  }

  std::vector<std::optional<SimulationOutput>> kept(agent_counts.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [r, k] = jobs[j];
    const std::uint64_t seed = replica_seed(report.base_seed, k);
    auto out = run_replica(row_params[r], base.algorithm, seed, base.preset,
                           "finite-size N=" + std::to_string(row_params[r].agents));
    report.rows[r].replicas[k] = {k, seed, summarize(out, burn_in, base.crash_threshold)};
    if (k == 0) kept[r] = std::move(out);
  });

  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    auto& row = report.rows[r];
    std::vector<double> vars;
    for (const auto& rep : row.replicas) vars.push_back(rep.summary.var_d_gamma);
    row.mean_var_d_gamma = mean(vars);
    row.sd_var_d_gamma = sd_of(vars);
    row.final_group_wealth = group_wealth(kept[r]->final_state.agents, row.groups.size());
  }

  if (out_dir) {
    ensure_dir(*out_dir);
    std::vector<CsvColumn> cols{{"agents", {}},      {"replica", {}},     {"var_d_gamma", {}},
                                {"mean_d_gamma", {}}, {"crash_count", {}}, {"mean_gamma", {}},
                                {"final_price", {}}};
    for (const auto& row : report.rows) {
      for (const auto& rep : row.replicas) {
        cols[0].values.push_back(static_cast<double>(row.agents));
        cols[1].values.push_back(static_cast<double>(rep.replica));
        cols[2].values.push_back(rep.summary.var_d_gamma);
        cols[3].values.push_back(rep.summary.mean_d_gamma);
        cols[4].values.push_back(static_cast<double>(rep.summary.crash_count));
        cols[5].values.push_back(rep.summary.mean_gamma);
        cols[6].values.push_back(rep.summary.final_price);
      }
    }
    write_csv(cols, *out_dir / "replicas.csv");

    std::vector<CsvColumn> table{{"agents", {}}, {"mean_var_d_gamma", {}}, {"sd_var_d_gamma", {}}};
    for (const auto& row : report.rows) {
      table[0].values.push_back(static_cast<double>(row.agents));
      table[1].values.push_back(row.mean_var_d_gamma);
      table[2].values.push_back(row.sd_var_d_gamma);
    }
    write_csv(table, *out_dir / "report.csv");

    std::ostringstream summary;
    summary << "experiment: finite-size\n";
    summary << "replicas: " << base.replicas << "\n";
    summary << "burn_in: " << burn_in << "\n";
    summary << "note: memory groups scaled proportionally from the base config; n_total = agents * n0\n";
    for (const auto& row : report.rows) {
      summary << "agents " << row.agents << " groups";
      for (const auto& g : row.groups) summary << " " << g.count << ":" << g.memory;
      summary << " mean_var_d_gamma: " << format_double(row.mean_var_d_gamma)
              << " final_group_wealth(replica 0):";
      for (const double w : row.final_group_wealth) summary << " " << format_double(w);
      summary << "\n";
    }
    write_text(summary.str(), *out_dir / "summary.txt");
    SimulationConfig recorded = base;
    recorded.agent_counts.assign(agent_counts.begin(), agent_counts.end());
    write_text(experiment_metadata(recorded, report.base_seed, "finite-size"),
               *out_dir / "metadata.txt");

    if (base.record.series) {
      for (std::size_t r = 0; r < report.rows.size(); ++r) {
        const fs::path dir = *out_dir / ("N" + std::to_string(report.rows[r].agents));
        ensure_dir(dir);
        write_csv(series_columns(*kept[r], base.record), dir / "series.csv");
      }
    }
  }
  return report;
}

LatticeCheck check_lattice_identity(std::uint64_t seed, std::size_t draws) {
  LatticeCheck out;
  if (draws < 3) return out;
  out.triples = draws - 2;

  auto holds = [](std::uint64_t x0, std::uint64_t x1, std::uint64_t x2) {
    // 6 x1 - 9 x0 mod 2^31, computed in unsigned arithmetic
    const std::uint64_t rhs = (6 * x1 + (std::uint64_t{1} << 40) - 9 * x0) & kRanduModulusMask;
    return x2 == rhs;
  };

  RngStream randu(RngAlgorithm::Randu, seed);
  std::uint64_t a = randu.next_raw();
  std::uint64_t b = randu.next_raw();
  out.randu_identity_holds = true;
  for (std::size_t k = 0; k < out.triples; ++k) {
    const std::uint64_t c = randu.next_raw();
    if (!holds(a, b, c)) out.randu_identity_holds = false;
    a = b;
    b = c;
  }

  RngStream mt(RngAlgorithm::MersenneHQ, seed);
  a = mt.next_raw() >> 33;
  b = mt.next_raw() >> 33;
  for (std::size_t k = 0; k < out.triples; ++k) {
    const std::uint64_t c = mt.next_raw() >> 33;
    if (!holds(a, b, c)) {
      out.mersenne_first_violation = k;
      break;
    }
    a = b;
    b = c;
  }
  return out;
}

bool StatComparison::exceeds_spread() const noexcept {
  return std::abs(randu_mean - mersenne_mean) > mersenne_sd;
}

RngQualityReport experiment_rng_quality(const SimulationConfig& base,
                                        const std::optional<fs::path>& out_dir) {
  RngQualityReport report;
  report.base_seed = experiment_base_seed(base);
  const long burn_in = base.resolved_burn_in();
  const std::size_t n = base.replicas;
  report.mersenne.resize(n);
  report.randu.resize(n);

  std::vector<std::optional<SimulationOutput>> kept(2);
  parallel_for(2 * n, [&](std::size_t j) {
    const std::size_t k = j / 2;
    const bool use_randu = j % 2 == 1;
    const std::uint64_t seed = replica_seed(report.base_seed, k);
    const auto alg = use_randu ? RngAlgorithm::Randu : RngAlgorithm::MersenneHQ;
    auto out = run_replica(base.params, alg, seed, base.preset,
                           std::string("rng-quality ") + std::string(to_string(alg)));
    auto& slot = use_randu ? report.randu[k] : report.mersenne[k];
    slot = {k, seed, summarize(out, burn_in, base.crash_threshold)};
    if (k == 0) kept[use_randu ? 1 : 0] = std::move(out);
  });

  auto compare = [&](auto stat) {
    std::vector<double> mt, ra;
    for (std::size_t k = 0; k < n; ++k) {
      mt.push_back(stat(report.mersenne[k].summary));
      ra.push_back(stat(report.randu[k].summary));
    }
    return StatComparison{mean(mt), sd_of(mt), mean(ra), sd_of(ra)};
  };
  report.crash_count = compare([](const RunSummary& s) { return double(s.crash_count); });
  report.kurtosis = compare([](const RunSummary& s) { return s.excess_kurtosis.value_or(0.0); });
  report.lattice = check_lattice_identity(replica_seed(report.base_seed, 0), 100000);

  if (out_dir) {
    ensure_dir(*out_dir);
    std::vector<CsvColumn> cols{{"replica", {}},        {"mersenne_crashes", {}},
                                {"randu_crashes", {}},  {"mersenne_kurtosis", {}},
                                {"randu_kurtosis", {}}, {"mersenne_final_price", {}},
                                {"randu_final_price", {}}};
    for (std::size_t k = 0; k < n; ++k) {
      const auto& m = report.mersenne[k].summary;
      const auto& r = report.randu[k].summary;
      cols[0].values.push_back(static_cast<double>(k));
      cols[1].values.push_back(static_cast<double>(m.crash_count));
      cols[2].values.push_back(static_cast<double>(r.crash_count));
      cols[3].values.push_back(m.excess_kurtosis.value_or(NAN));
      cols[4].values.push_back(r.excess_kurtosis.value_or(NAN));
      cols[5].values.push_back(m.final_price);
      cols[6].values.push_back(r.final_price);
    }
    write_csv(cols, *out_dir / "replicas.csv");

    const auto& mt_run = *kept[0];
    const auto& ra_run = *kept[1];
    std::vector<double> t(mt_run.prices().size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
    write_csv({{"t", t}, {"S_mersenne", mt_run.prices()}, {"S_randu", ra_run.prices()}},
              *out_dir / "prices.csv");

    auto line = [](std::ostringstream& o, const char* name, const StatComparison& c) {
      o << name << ": mersenne " << format_double(c.mersenne_mean) << " +- "
        << format_double(c.mersenne_sd) << ", randu " << format_double(c.randu_mean) << " +- "
        << format_double(c.randu_sd) << ", exceeds_mersenne_spread: "
        << (c.exceeds_spread() ? "true" : "false") << "\n";
    };
    std::ostringstream summary;
    summary << "experiment: rng-quality\n";
    summary << "replicas: " << n << "\n";
    summary << "burn_in: " << burn_in << "\n";
    line(summary, "crash_count", report.crash_count);
    line(summary, "excess_kurtosis", report.kurtosis);
    summary << "lattice_triples: " << report.lattice.triples << "\n";
    summary << "randu_lattice_identity_holds: "
            << (report.lattice.randu_identity_holds ? "true" : "false") << "\n";
    summary << "mersenne_first_violation: "
            << (report.lattice.mersenne_first_violation
                    ? std::to_string(*report.lattice.mersenne_first_violation)
                    : std::string("none"))
            << "\n";
    write_text(summary.str(), *out_dir / "summary.txt");
    write_text(experiment_metadata(base, report.base_seed, "rng-quality"), *out_dir / "metadata.txt");
  }
  return report;
}

ToleranceReport experiment_tolerance_sweep(const SimulationConfig& base, std::span<const double> xis,
                                           const std::optional<fs::path>& out_dir) {
  if (xis.empty()) throw ParameterError("tolerance sweep needs at least one xi");
  ToleranceReport report;
  report.base_seed = experiment_base_seed(base);
  const long burn_in = base.resolved_burn_in();
  const std::size_t n = base.replicas;
  const std::size_t max_lag = base.max_lag;

  struct ReplicaSeries {
    std::vector<double> acf_log;
    std::vector<double> acf_abs;
    std::vector<QQPoint> qq;
    double iterations_per_step = 0.0;
  };
  std::vector<ModelParams> row_params;
  for (const double xi : xis) {
    ModelParams p = base.params;
    p.clearance_mode = ClearanceMode::Iterative;
    p.xi = xi;
    validate(p);
    row_params.push_back(p);
    ToleranceRow row;
    row.xi = xi;
    row.replicas.resize(n);
    report.rows.push_back(std::move(row));
  }
  std::vector<std::vector<ReplicaSeries>> series(xis.size(), std::vector<ReplicaSeries>(n));
  std::vector<std::optional<SimulationOutput>> kept(xis.size());

  parallel_for(xis.size() * n, [&](std::size_t j) {
    const std::size_t r = j / n;
    const std::size_t k = j % n;
    const std::uint64_t seed = replica_seed(report.base_seed, k);
    auto out = run_replica(row_params[r], base.algorithm, seed, base.preset,
                           "tolerance-sweep xi=" + format_double(xis[r]));
    report.rows[r].replicas[k] = {k, seed, summarize(out, burn_in, base.crash_threshold)};
    auto& s = series[r][k];
    const auto lr = out.log_return_series(burn_in);
    if (lr.size() >= max_lag + 2) {
      try {
        s.acf_log = autocorrelation(lr, max_lag);
        std::vector<double> abs_lr(lr.size());
        for (std::size_t i = 0; i < lr.size(); ++i) abs_lr[i] = std::abs(lr[i]);
        s.acf_abs = autocorrelation(abs_lr, max_lag);
      } catch (const DomainError&) {
        s.acf_log.clear();
        s.acf_abs.clear();
      }
    }
    if (k == 0 && lr.size() >= 2) {
      try {
        s.qq = qq_data(lr);
      } catch (const DomainError&) {
      }
    }
    if (!out.records.empty()) {
      s.iterations_per_step =
          static_cast<double>(out.meta.total_iterations) / static_cast<double>(out.records.size());
    }
    if (k == 0) kept[r] = std::move(out);
  });

  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    auto& row = report.rows[r];
    std::vector<double> gammas, kurt, iters;
    row.acf_log.assign(max_lag + 1, 0.0);
    row.acf_abs.assign(max_lag + 1, 0.0);
    std::size_t acf_count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& s = row.replicas[k].summary;
      gammas.push_back(s.mean_gamma);
      row.max_gamma = std::max(row.max_gamma, s.max_gamma);
      if (s.excess_kurtosis) kurt.push_back(*s.excess_kurtosis);
      iters.push_back(series[r][k].iterations_per_step);
      if (!series[r][k].acf_log.empty()) {
        ++acf_count;
        for (std::size_t l = 0; l <= max_lag; ++l) {
          row.acf_log[l] += series[r][k].acf_log[l];
          row.acf_abs[l] += series[r][k].acf_abs[l];
        }
      }
    }
    for (std::size_t l = 0; l <= max_lag; ++l) {
      row.acf_log[l] = acf_count ? row.acf_log[l] / double(acf_count) : NAN;
      row.acf_abs[l] = acf_count ? row.acf_abs[l] / double(acf_count) : NAN;
    }
    row.mean_gamma = mean(gammas);
    row.mean_kurtosis = kurt.empty() ? NAN : mean(kurt);
    row.mean_iterations = mean(iters);
    row.qq = series[r][0].qq;
  }

  if (out_dir) {
    ensure_dir(*out_dir);
    std::vector<CsvColumn> table{{"xi", {}},         {"mean_gamma", {}},      {"max_gamma", {}},
                                 {"mean_kurtosis", {}}, {"mean_iterations", {}}};
    for (const auto& row : report.rows) {
      table[0].values.push_back(row.xi);
      table[1].values.push_back(row.mean_gamma);
      table[2].values.push_back(row.max_gamma);
      table[3].values.push_back(row.mean_kurtosis);
      table[4].values.push_back(row.mean_iterations);
    }
    write_csv(table, *out_dir / "report.csv");

    std::vector<CsvColumn> acf{{"lag", {}}};
    for (std::size_t l = 0; l <= max_lag; ++l) acf[0].values.push_back(static_cast<double>(l));
    for (const auto& row : report.rows) {
      acf.push_back({"acf_log_xi" + format_double(row.xi), row.acf_log});
      acf.push_back({"acf_abs_xi" + format_double(row.xi), row.acf_abs});
    }
    write_csv(acf, *out_dir / "acf.csv");

    std::ostringstream summary;
    summary << "experiment: tolerance-sweep\n";
    summary << "replicas: " << n << "\n";
    summary << "burn_in: " << burn_in << "\n";
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      const auto& row = report.rows[r];
      summary << "xi " << format_double(row.xi) << " mean_gamma: " << format_double(row.mean_gamma)
              << " max_gamma: " << format_double(row.max_gamma)
              << " mean_kurtosis: " << format_double(row.mean_kurtosis)
              << " mean_iterations: " << format_double(row.mean_iterations) << "\n";

      const fs::path dir = *out_dir / ("xi" + format_double(row.xi));
      ensure_dir(dir);
      std::vector<CsvColumn> qq{{"theoretical", {}}, {"empirical", {}}};
      for (const auto& p : row.qq) {
        qq[0].values.push_back(p.theoretical);
        qq[1].values.push_back(p.empirical);
      }
      write_csv(qq, dir / "qq.csv");
      if (base.record.series) write_csv(series_columns(*kept[r], base.record), dir / "series.csv");
    }
    write_text(summary.str(), *out_dir / "summary.txt");
    SimulationConfig recorded = base;
    recorded.xis.assign(xis.begin(), xis.end());
    write_text(experiment_metadata(recorded, report.base_seed, "tolerance-sweep"),
               *out_dir / "metadata.txt");
  }
  return report;
}

} // namespace lls
