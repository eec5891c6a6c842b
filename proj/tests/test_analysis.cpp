#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lls/analysis.hpp"
#include "lls/errors.hpp"

using namespace lls;

namespace {

std::vector<double> alternating(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return v;
}

std::vector<double> gaussian_sample(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(gen);
  return v;
}

} // namespace

TEST_CASE("mean and variance") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(sample_variance(v) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(sample_variance(std::vector<double>{3}) == 0.0);
  const auto st = series_stats(v);
  CHECK(st.length == 4);
  REQUIRE(st.excess_kurtosis.has_value());
  CHECK(!series_stats(std::vector<double>{1, 1, 1, 1}).excess_kurtosis.has_value());
}

TEST_CASE("log_returns") {
  CHECK(log_returns(std::vector<double>{4, 4, 4}) == std::vector<double>{0, 0});
  const auto one = log_returns(std::vector<double>{1, std::exp(1.0)});
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(log_returns(std::vector<double>{4, 4.3})[0] ==
        doctest::Approx(0.07232066157962608).epsilon(1e-14));
  CHECK_THROWS_AS(log_returns(std::vector<double>{4}), ParameterError);
  CHECK_THROWS_AS(log_returns(std::vector<double>{4, 0}), DomainError);
}

TEST_CASE("autocorrelation") {
  const auto acf = autocorrelation(alternating(8), 2);
  REQUIRE(acf.size() == 3);
  CHECK(acf[0] == 1.0);
  CHECK(acf[1] == doctest::Approx(-0.875).epsilon(1e-15));
  CHECK(acf[2] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(autocorrelation(std::vector<double>(10, 2.0), 3), DomainError);
  CHECK_THROWS_AS(autocorrelation(alternating(5), 4), ParameterError);
}

TEST_CASE("property: autocorrelation is bounded and white noise stays in band") {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto v = gaussian_sample(2000, seed);
    const auto acf = autocorrelation(v, 50);
    CHECK(acf[0] == doctest::Approx(1.0).epsilon(1e-14));
    int outside = 0;
    for (std::size_t l = 1; l < acf.size(); ++l) {
      REQUIRE(std::abs(acf[l]) <= 1.0);
      if (std::abs(acf[l]) > 1.96 / std::sqrt(2000.0)) ++outside;
    }
    CHECK(outside <= 10);
  }
}

TEST_CASE("normal_quantile against reference values") {
  // reference values from an independent high-precision implementation
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
  CHECK(normal_quantile(0.001) == doctest::Approx(-3.090232306167813).epsilon(1e-13));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.9599639845400545).epsilon(1e-13));
  CHECK(normal_quantile(0.3) == doctest::Approx(-0.5244005127080409).epsilon(1e-13));
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.8) == doctest::Approx(0.8416212335729143).epsilon(1e-13));
  CHECK(normal_quantile(0.9999) == doctest::Approx(3.719016485455709).epsilon(1e-13));
  CHECK(normal_quantile(0.0) == -INFINITY);
  CHECK(normal_quantile(1.0) == INFINITY);
  CHECK_THROWS_AS(normal_quantile(1.5), DomainError);
}

TEST_CASE("property: normal_quantile inverts erfc") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> up(1e-6, 1 - 1e-6);
  for (int k = 0; k < 2000; ++k) {
    const double p = up(gen);
    const double q = normal_quantile(p);
    REQUIRE(0.5 * std::erfc(-q / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("qq_data") {
  SUBCASE("sample on the theoretical quantiles maps onto the diagonal") {
    const std::size_t n = 101;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = normal_quantile((i + 0.5) / n);
    std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
    const auto qq = qq_data(v);
    REQUIRE(qq.size() == n);
    for (const auto& pt : qq) CHECK(pt.empirical == doctest::Approx(pt.theoretical).epsilon(1e-12));
  }
  SUBCASE("affine maps leave the plot unchanged") {
    const auto v = gaussian_sample(500, 9);
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = 3.0 * v[i] - 7.0;
    const auto a = qq_data(v);
    const auto b = qq_data(w);
    for (std::size_t i = 0; i < a.size(); ++i)
      REQUIRE(a[i].empirical == doctest::Approx(b[i].empirical).epsilon(1e-10));
  }
  SUBCASE("output is sorted") {
    const auto qq = qq_data(gaussian_sample(300, 4));
    for (std::size_t i = 1; i < qq.size(); ++i) {
      REQUIRE(qq[i].theoretical > qq[i - 1].theoretical);
      REQUIRE(qq[i].empirical >= qq[i - 1].empirical);
    }
  }
  SUBCASE("heavy tails bend away from the diagonal") {
    std::mt19937_64 gen(5);
    std::student_t_distribution<double> td(3.0);
    std::vector<double> v(5000);
    for (auto& x : v) x = td(gen);
    const auto qq = qq_data(v);
    CHECK(qq.back().empirical > qq.back().theoretical);
    CHECK(qq.front().empirical < qq.front().theoretical);
  }
  CHECK_THROWS(qq_data(std::vector<double>(5, 1.0)));
}

TEST_CASE("excess_kurtosis") {
  CHECK(excess_kurtosis(alternating(100)) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(std::abs(excess_kurtosis(gaussian_sample(100000, 2))) < 0.1);
  std::vector<double> outlier(1000, 0.0);
  for (std::size_t i = 0; i < outlier.size(); ++i) outlier[i] = (i % 2 == 0) ? 0.1 : -0.1;
  outlier[0] = 20.0;
  CHECK(excess_kurtosis(outlier) > 100.0);
  const auto v = gaussian_sample(1000, 8);
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = -2.5 * v[i] + 1.0;
  CHECK(excess_kurtosis(w) == doctest::Approx(excess_kurtosis(v)).epsilon(1e-10));
  CHECK_THROWS(excess_kurtosis(std::vector<double>(10, 1.0)));
}

TEST_CASE("d_gamma") {
  const std::vector<double> star{0.5, 0.5, 0.5};
  const std::vector<double> noised{0.6, 0.7, 0.56};
  CHECK(d_gamma(star, noised) == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(d_gamma(noised, star) == doctest::Approx(0.12).epsilon(1e-14));
  CHECK_THROWS_AS(d_gamma(star, std::vector<double>{0.5}), ParameterError);
}

TEST_CASE("group_wealth") {
  std::vector<AgentState> agents(4);
  agents[0].w = 1;
  agents[1].w = 2;
  agents[2].w = 4;
  agents[3].w = 8;
  agents[0].group = 0;
  agents[1].group = 1;
  agents[2].group = 0;
  agents[3].group = 2;
  CHECK(group_wealth(agents, 3) == std::vector<double>{5, 2, 8});
}
