#include "lls/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "lls/errors.hpp"

namespace lls {

double mean(std::span<const double> series) {
  if (series.empty()) throw ParameterError("mean of an empty series");
  double sum = 0.0;
  for (const double y : series) sum += y;
  return sum / static_cast<double>(series.size());
}

double sample_variance(std::span<const double> series) {
  if (series.size() < 2) return 0.0;
  const double m = mean(series);
  double ss = 0.0;
  for (const double y : series) ss += (y - m) * (y - m);
  return ss / static_cast<double>(series.size() - 1);
}

SeriesStats series_stats(std::span<const double> series) {
  SeriesStats out;
  out.length = series.size();
  if (series.empty()) return out;
  out.mean = mean(series);
  out.variance = sample_variance(series);
  if (series.size() >= 4 && out.variance > 0.0) out.excess_kurtosis = excess_kurtosis(series);
  return out;
}

std::vector<double> log_returns(std::span<const double> prices) {
  if (prices.size() < 2) throw ParameterError("log_returns needs at least two prices");
  for (const double s : prices) {
    if (!(s > 0.0)) throw DomainError("log_returns: non-positive price");
  }
  std::vector<double> out(prices.size() - 1);
  for (std::size_t t = 0; t + 1 < prices.size(); ++t) {
    out[t] = std::log(prices[t + 1]) - std::log(prices[t]);
  }
  return out;
}

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
  if (series.size() < max_lag + 2) {
    throw ParameterError("autocorrelation: series shorter than max_lag + 2");
  }
  const double m = mean(series);
  std::vector<double> centred(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) centred[t] = series[t] - m;

  double denom = 0.0;
  for (const double c : centred) denom += c * c;
  if (!(denom > 0.0)) throw DomainError("autocorrelation: constant series");

  std::vector<double> out(max_lag + 1);
  out[0] = 1.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double num = 0.0;
    for (std::size_t t = 0; t + lag < centred.size(); ++t) num += centred[t] * centred[t + lag];
    out[lag] = num / denom;
  }
  return out;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -INFINITY;
    if (p == 1.0) return INFINITY;
    throw DomainError("normal_quantile: probability outside [0, 1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val = 0.0;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

std::vector<QQPoint> qq_data(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw ParameterError("qq_data needs at least two points");

  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = mean(sorted);
  double ss = 0.0;
  for (const double y : sorted) ss += (y - m) * (y - m);
  if (!(ss > 0.0)) throw DomainError("qq_data: zero variance");

  std::vector<QQPoint> out(n);
  double qss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out[i].theoretical = normal_quantile(p);
    qss += out[i].theoretical * out[i].theoretical;
  }
  const double scale = std::sqrt(qss / ss);
  for (std::size_t i = 0; i < n; ++i) out[i].empirical = (sorted[i] - m) * scale;
  return out;
}

double excess_kurtosis(std::span<const double> series) {
  if (series.size() < 4) throw ParameterError("excess_kurtosis needs at least four points");
  const double m = mean(series);
  double m2 = 0.0;
  double m4 = 0.0;
  for (const double y : series) {
    const double c = (y - m) * (y - m);
    m2 += c;
    m4 += c * c;
  }
  const double n = static_cast<double>(series.size());
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw DomainError("excess_kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

double d_gamma(std::span<const double> gammas_star, std::span<const double> gammas_noised) {
  if (gammas_star.size() != gammas_noised.size()) {
    throw ParameterError("d_gamma: length mismatch");
  }
  if (gammas_star.empty()) throw ParameterError("d_gamma: empty input");
  return std::abs(mean(gammas_noised) - mean(gammas_star));
}

std::vector<double> group_wealth(std::span<const AgentState> agents, std::size_t group_count) {
  std::vector<double> out(group_count, 0.0);
  for (const auto& a : agents) {
    if (a.group >= group_count) throw ParameterError("group_wealth: group index out of range");
    out[a.group] += a.w;
  }
  return out;
}

} // namespace lls
