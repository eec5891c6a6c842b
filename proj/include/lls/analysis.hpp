#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lls/model.hpp"

namespace lls {

struct SeriesStats {
  double mean = 0.0;
  double variance = 0.0;                  // unbiased, n - 1 denominator
  std::optional<double> excess_kurtosis;  // needs length >= 4 and variance > 0
  std::size_t length = 0;
};

double mean(std::span<const double> series);

// Unbiased sample variance; zero for fewer than two points.
double sample_variance(std::span<const double> series);

SeriesStats series_stats(std::span<const double> series);

// ln(S[t+1]) - ln(S[t]). Throws DomainError on a non-positive price.
std::vector<double> log_returns(std::span<const double> prices);

/// Biased sample autocorrelation for lags 0..max_lag:
///
///   rho(l) = sum_t (y_t - m)(y_{t+l} - m) / sum_t (y_t - m)^2
///
/// with the full-series denominator, so |rho| <= 1. Throws DomainError for
/// a constant series.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

// Standard normal quantile (Wichura, AS 241), relative accuracy ~1e-16.
double normal_quantile(double p);

struct QQPoint {
  double theoretical = 0.0;
  double empirical = 0.0;
};

/// Sorted, standardized sample against normal quantiles at the Hazen
/// plotting positions (i - 0.5) / n.
///
/// The sample is centred and rescaled to the standard deviation of the
/// theoretical quantiles themselves (which tends to 1 as n grows), so a
/// sample lying exactly on those quantiles maps onto the diagonal.
std::vector<QQPoint> qq_data(std::span<const double> series);

// m4 / m2^2 - 3 with central sample moments.
double excess_kurtosis(std::span<const double> series);

// |mean(noised) - mean(star)|
double d_gamma(std::span<const double> gammas_star, std::span<const double> gammas_noised);

// Total wealth per memory group.
std::vector<double> group_wealth(std::span<const AgentState> agents, std::size_t group_count);

} // namespace lls
