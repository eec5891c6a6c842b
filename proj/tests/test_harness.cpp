#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lls/config.hpp"
#include "lls/csv.hpp"
#include "lls/errors.hpp"
#include "lls/experiments.hpp"
#include "lls/simulation.hpp"

using namespace lls;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lls_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SimulationConfig small_config(std::uint64_t seed) {
  auto c = preset_config("lls-basic");
  c.params.steps = 120;
  c.seed = seed;
  return c;
}

} // namespace

TEST_CASE("render_csv") {
  const std::vector<CsvColumn> cols{{"t", {0, 1}}, {"S", {4.0, 4.3}}};
  CHECK(render_csv(cols) == "t,S\n0,4\n1,4.2999999999999998\n");
  CHECK(render_csv({{"t", {}}, {"S", {}}}) == "t,S\n");
  CHECK_THROWS_AS(render_csv({{"t", {0, 1}}, {"S", {4.0}}}), ParameterError);
}

TEST_CASE("write_csv and write_text") {
  const auto dir = scratch("csv");
  write_csv({{"a", {1.5}}}, dir / "x.csv");
  CHECK(slurp(dir / "x.csv") == "a\n1.5\n");
  CHECK_THROWS_AS(write_text("x", dir / "missing" / "deeper" / "f.txt"), IoError);
}

TEST_CASE("same seed gives byte-identical output") {
  for (const auto alg : {RngAlgorithm::MersenneHQ, RngAlgorithm::Randu}) {
    auto c = small_config(123);
    c.algorithm = alg;
    const auto a = run_simulation(c);
    const auto b = run_simulation(c);
    CHECK(render_csv(series_columns(a, c.record)) == render_csv(series_columns(b, c.record)));
    CHECK(a.meta.draws == b.meta.draws);
  }
  auto c = small_config(123);
  auto d = small_config(124);
  CHECK(run_simulation(c).prices() != run_simulation(d).prices());
}

TEST_CASE("zero steps") {
  auto c = small_config(5);
  c.params.steps = 0;
  const auto out = run_simulation(c);
  CHECK(out.records.empty());
  CHECK(out.prices() == std::vector<double>{4.0});
  CHECK(!out.meta.aborted());
  const auto s = summarize(out, 0, c.crash_threshold);
  CHECK(s.completed_steps == 0);
  CHECK(s.final_price == 4.0);
}

TEST_CASE("metadata replays the run") {
  const auto dir = scratch("replay");
  auto c = small_config(0);
  c.seed.reset();  // resolved from entropy
  const auto out = run_simulation(c);
  write_run(dir, c, out);
  REQUIRE(fs::exists(dir / "series.csv"));
  REQUIRE(fs::exists(dir / "summary.txt"));
  const auto replay_cfg = load_config(dir / "metadata.txt");
  REQUIRE(replay_cfg.seed == out.meta.seed);
  const auto again = run_simulation(replay_cfg);
  const auto dir2 = scratch("replay2");
  write_run(dir2, replay_cfg, again);
  CHECK(slurp(dir / "series.csv") == slurp(dir2 / "series.csv"));
}

TEST_CASE("series columns") {
  auto c = preset_config("lls-3groups");
  c.params.steps = 5;
  c.seed = 3;
  const auto out = run_simulation(c);
  const auto cols = series_columns(out, c.record);
  std::vector<std::string> names;
  for (const auto& col : cols) {
    names.push_back(col.name);
    CHECK(col.values.size() == 5);
  }
  CHECK(names.front() == "t");
  CHECK(names.back() == "wealth_g2");
  RecordFlags no_wealth;
  no_wealth.group_wealth = false;
  CHECK(series_columns(out, no_wealth).back().name == "iterations");
}

TEST_CASE("parallel replicas match sequential runs") {
  const std::size_t n = 6;
  std::vector<std::vector<double>> par(n);
  parallel_for(n, [&](std::size_t k) {
    par[k] = run_simulation(small_config(replica_seed(9, k))).prices();
  });
  for (std::size_t k = n; k-- > 0;) {
    CHECK(run_simulation(small_config(replica_seed(9, k))).prices() == par[k]);
  }
  CHECK_THROWS_AS(parallel_for(4, [](std::size_t k) {
                    if (k == 2) throw ParameterError("boom");
                  }),
                  ParameterError);
}

TEST_CASE("finite-size experiment smoke test") {
  const auto dir = scratch("fs");
  auto c = default_experiment_config("finite-size");
  c.params.steps = 300;
  c.replicas = 2;
  c.seed = 4;
  const std::vector<std::size_t> counts{60};
  const auto rep = experiment_finite_size(c, counts, dir);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].agents == 60);
  CHECK(rep.rows[0].replicas.size() == 2);
  CHECK(rep.rows[0].mean_var_d_gamma > 0.0);
  CHECK(rep.rows[0].final_group_wealth.size() == 3);
  CHECK(fs::exists(dir / "report.csv"));
  CHECK(fs::exists(dir / "metadata.txt"));
  // same base seed, same numbers
  const auto again = experiment_finite_size(c, counts);
  CHECK(again.rows[0].mean_var_d_gamma == rep.rows[0].mean_var_d_gamma);
}

TEST_CASE("tolerance sweep smoke test") {
  auto c = default_experiment_config("tolerance-sweep");
  c.params.steps = 150;
  c.replicas = 2;
  c.seed = 4;
  c.max_lag = 10;
  const std::vector<double> xis{0.5};
  const auto rep = experiment_tolerance_sweep(c, xis);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].acf_log.size() == 11);
  CHECK(rep.rows[0].acf_log[0] == doctest::Approx(1.0));
  CHECK(!rep.rows[0].qq.empty());
  CHECK(rep.rows[0].mean_iterations >= 0.0);
}

TEST_CASE("rng quality lattice check") {
  const auto lc = check_lattice_identity(1, 1000);
  CHECK(lc.randu_identity_holds);
  CHECK(lc.mersenne_first_violation.has_value());
}
