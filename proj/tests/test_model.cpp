#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "lls/errors.hpp"
#include "lls/model.hpp"

using namespace lls;

namespace {

// Brute-force argmax of the mean log wealth factor on a uniform grid of
// `points` values spanning [0.01, 0.99].
double grid_argmax(const std::vector<double>& xs, double r, int points) {
  double best_gamma = 0.01;
  double best = -INFINITY;
  for (int k = 0; k < points; ++k) {
    const double g = 0.01 + 0.98 * k / (points - 1);
    double u = 0.0;
    for (const double x : xs) u += std::log((1 - g) * (1 + r) + g * (1 + x));
    if (u > best) {
      best = u;
      best_gamma = g;
    }
  }
  return best_gamma;
}

} // namespace

TEST_CASE("dividend_step") {
  CHECK(dividend_step(0.2, 0.05) == doctest::Approx(0.21).epsilon(1e-15));
  CHECK(dividend_step(0.37, 0.0) == 0.37);
  CHECK(dividend_step(0.004, 0.00015) == doctest::Approx(0.0040006).epsilon(1e-15));
  CHECK_THROWS_AS(dividend_step(0.2, -1.0), ParameterError);
}

TEST_CASE("stock_return") {
  CHECK(stock_return(4, 4, 0.21) == doctest::Approx(0.0525).epsilon(1e-15));
  CHECK(stock_return(4, 4, 0) == 0.0);
  CHECK(stock_return(4, 4.3, 0.21) == doctest::Approx(0.1275).epsilon(1e-14));
  CHECK(stock_return(4, 1e-12, 0) > -1.0);
  CHECK_THROWS_AS(stock_return(0, 1, 0), ParameterError);
}

TEST_CASE("wealth_step") {
  CHECK(wealth_step(1000, 0.01, 0.04, 0.04) == doctest::Approx(1040).epsilon(1e-15));
  CHECK(wealth_step(1000, 0.4, 0.04, 0.0525) == doctest::Approx(1045).epsilon(1e-15));
  for (const double g : {0.01, 0.3, 0.99}) {
    CHECK(wealth_step(250, g, 0.07, 0.07) == doctest::Approx(250 * 1.07).epsilon(1e-14));
  }
  // x close to -1 keeps wealth positive
  CHECK(wealth_step(1000, 0.99, 0.04, -0.999999) > 0.0);
}

TEST_CASE("utility_derivative") {
  const std::vector<double> flat{0.04, 0.04, 0.04};
  CHECK(utility_derivative(0.3, flat, 0.04) == 0.0);
  const std::vector<double> one{0.1};
  CHECK(utility_derivative(0.5, one, 0.04) == doctest::Approx(0.06 / 1.07).epsilon(1e-14));
  const std::vector<double> pair{0.2, -0.15};
  CHECK(std::abs(utility_derivative(5.0 / 6.0, pair, 0.0)) < 1e-15);
  const std::vector<double> bad{-2.0};
  CHECK_THROWS_AS(utility_derivative(0.99, bad, 0.04), DomainError);
  CHECK_THROWS_AS(utility_derivative(0.5, std::vector<double>{}, 0.04), ParameterError);
}

TEST_CASE("optimal_gamma boundary and interior cases") {
  CHECK(optimal_gamma(std::vector<double>{0.1, 0.08}, 0.04) == 0.99);
  CHECK(optimal_gamma(std::vector<double>{0.01}, 0.04) == 0.01);
  const std::vector<double> pair{0.2, -0.15};
  const double g = optimal_gamma(pair, 0.0);
  CHECK(g == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
  // grid oracle over 0.01, 0.0101, ..., 0.99
  CHECK(std::abs(g - grid_argmax(pair, 0.0, 9801)) <= 1e-4);
}

TEST_CASE("optimal_gamma ties at x = r resolve to gamma_min") {
  const std::vector<double> flat(15, 0.04);
  CHECK(optimal_gamma(flat, 0.04) == 0.01);
  // expected log utility is flat in gamma
  CHECK(expected_log_utility(0.01, flat, 0.04) ==
        doctest::Approx(expected_log_utility(0.99, flat, 0.04)).epsilon(1e-14));
}

TEST_CASE("property: optimal_gamma matches a 1e4-point grid search") {
  std::mt19937_64 gen(20190101);
  std::uniform_real_distribution<double> ux(-0.5, 0.5);
  std::uniform_real_distribution<double> ur(0.0, 0.1);
  std::uniform_int_distribution<int> len(1, 20);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> xs(len(gen));
    for (auto& x : xs) x = ux(gen);
    const double r = ur(gen);
    worst = std::max(worst, std::abs(optimal_gamma(xs, r) - grid_argmax(xs, r, 10000)));
  }
  CHECK(worst <= 2e-4);
}

TEST_CASE("property: f is strictly decreasing when returns differ") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ux(-0.5, 0.5);
  std::uniform_real_distribution<double> ug(0.01, 0.99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> xs(1 + trial % 20);
    for (auto& x : xs) x = ux(gen);
    xs.push_back(xs.front() + 0.1);
    double a = ug(gen);
    double b = ug(gen);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    REQUIRE(utility_derivative(a, xs, 0.03) > utility_derivative(b, xs, 0.03));
  }
}

TEST_CASE("cutoff") {
  CHECK(cutoff(0.5) == 0.5);
  CHECK(cutoff(1.2) == 0.99);
  CHECK(cutoff(-0.2) == 0.01);
}

TEST_CASE("apply_gamma_noise") {
  RngStream s(RngAlgorithm::MersenneHQ, 1);
  CHECK(apply_gamma_noise(0.4, s, 0.0) == 0.4);

  // eps drawn from a twin stream
  RngStream a(RngAlgorithm::MersenneHQ, 99);
  RngStream b(RngAlgorithm::MersenneHQ, 99);
  for (int k = 0; k < 200; ++k) {
    const double eps = b.next_gaussian(0.0, 0.2);
    CHECK(apply_gamma_noise(0.5, a, 0.2) == cutoff(0.5 + eps));
  }
  CHECK(cutoff(0.95 + 0.2) == 0.99);
  CHECK(cutoff(0.5 - 0.1) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("ReturnHistory keeps the newest entries first") {
  ReturnHistory h(3);
  for (const double x : {1.0, 2.0, 3.0, 4.0}) h.push(x);
  CHECK(h.size() == 3);
  CHECK(h.recent(0) == 4.0);
  CHECK(h.recent(2) == 2.0);
  CHECK(h.window(2) == std::vector<double>{4.0, 3.0});
  CHECK_THROWS_AS(h.recent(3), ParameterError);
}

TEST_CASE("init_state") {
  SUBCASE("basic preset is consistent") {
    RngStream s(RngAlgorithm::MersenneHQ, 5);
    const auto p = preset_basic();
    const auto st = init_state(p, s);
    REQUIRE(st.agents.size() == 100);
    for (const auto& a : st.agents) {
      CHECK(a.w == 1000.0);
      CHECK(a.gamma == 0.4);
      CHECK(a.gamma_star == 0.4);
      CHECK(a.n_held == 100.0);
      CHECK(a.gamma * a.w / st.market.S == doctest::Approx(a.n_held));
      CHECK(a.memory == 15);
    }
    CHECK(st.market.S == 4.0);
    CHECK(st.market.D == 0.2);
    CHECK(st.market.t == 0);
    CHECK(st.market.history.size() == 15);
    CHECK(p.n_total == 10000.0);
  }
  SUBCASE("history drawn oldest to newest") {
    auto p = preset_basic();
    RngStream s(RngAlgorithm::MersenneHQ, 5);
    RngStream twin(RngAlgorithm::MersenneHQ, 5);
    const auto st = init_state(p, s);
    const double oldest = twin.next_gaussian(p.mu_h, p.sigma_h);
    CHECK(st.market.history.recent(14) == oldest);
  }
  SUBCASE("zero history noise") {
    auto p = preset_basic();
    p.sigma_h = 0.0;
    RngStream s(RngAlgorithm::MersenneHQ, 5);
    const auto st = init_state(p, s);
    for (std::size_t j = 0; j < 15; ++j) CHECK(st.market.history.recent(j) == 0.0415);
  }
  SUBCASE("three groups") {
    RngStream s(RngAlgorithm::MersenneHQ, 5);
    const auto st = init_state(preset_three_groups(), s);
    REQUIRE(st.agents.size() == 99);
    CHECK(st.agents[0].memory == 10);
    CHECK(st.agents[32].memory == 10);
    CHECK(st.agents[33].memory == 141);
    CHECK(st.agents[66].memory == 256);
    CHECK(st.agents[98].group == 2);
    CHECK(st.market.history.size() == 256);
  }
  SUBCASE("group counts must match N") {
    auto p = preset_basic();
    p.memory_groups = {{50, 15}};
    RngStream s(RngAlgorithm::MersenneHQ, 5);
    CHECK_THROWS_AS(init_state(p, s), ConfigError);
  }
}

TEST_CASE("scale_groups") {
  const std::vector<MemoryGroup> base{{33, 10}, {33, 141}, {33, 256}};
  CHECK(scale_groups(base, 999) == std::vector<MemoryGroup>{{333, 10}, {333, 141}, {333, 256}});
  CHECK(scale_groups(base, 200) == std::vector<MemoryGroup>{{67, 10}, {67, 141}, {66, 256}});
  CHECK(scale_groups(base, 1000) == std::vector<MemoryGroup>{{334, 10}, {333, 141}, {333, 256}});
}

TEST_CASE("validate") {
  auto p = preset_basic();
  CHECK_NOTHROW(validate(p));
  p.r = 1.5;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = preset_basic();
  p.gamma0 = 0.995;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = preset_basic();
  p.clearance_mode = ClearanceMode::Iterative;
  p.xi = 0.0;
  CHECK_THROWS_AS(validate(p), ParameterError);
}
