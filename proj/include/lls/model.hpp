#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lls/rng.hpp"

namespace lls {

enum class ClearanceMode { Explicit, Iterative };

std::string_view to_string(ClearanceMode mode) noexcept;
ClearanceMode parse_clearance_mode(std::string_view name);

// `count` agents that all look back `memory` steps.
struct MemoryGroup {
  std::size_t count = 0;
  std::size_t memory = 1;

  bool operator==(const MemoryGroup&) const = default;
};

inline constexpr double kGammaMin = 0.01;
inline constexpr double kGammaMax = 0.99;

struct ModelParams {
  std::size_t agents = 100;
  double r = 0.04;             // bond interest per step
  double z1 = 0.05;            // dividend growth support [z1, z2]
  double z2 = 0.05;
  double sigma_gamma = 0.2;    // investment fraction noise
  std::vector<MemoryGroup> memory_groups{{100, 15}};
  double n_total = 10000.0;    // stock supply
  long steps = 200;

  ClearanceMode clearance_mode = ClearanceMode::Explicit;
  double xi = 0.1;             // iterative stopping tolerance, in stocks
  bool dividend_lag = false;   // clearing price uses the previous dividend
  int max_expansions = 60;
  int max_bisections = 200;

  double gamma_min = kGammaMin;
  double gamma_max = kGammaMax;

  // artificial return history and initial values
  double mu_h = 0.0415;
  double sigma_h = 0.003;
  double w0 = 1000.0;
  double n0_per_agent = 100.0;
  double S0 = 4.0;
  double D0 = 0.2;
  double gamma0 = 0.4;

  std::size_t max_memory() const noexcept;
  std::size_t group_count() const noexcept { return memory_groups.size(); }
};

// Throws ParameterError naming the first violated constraint.
void validate(const ModelParams& params);

// 100 agents, memory 15, r = 0.04, deterministic 5% dividend growth.
ModelParams preset_basic();
// 99 agents in three groups with memory 10 / 141 / 256.
ModelParams preset_three_groups();

// Splits `agents` across groups in proportion to the existing counts
// (largest remainder, ties to the lower group index).
std::vector<MemoryGroup> scale_groups(std::span<const MemoryGroup> groups, std::size_t agents);

struct AgentState {
  double w = 0.0;
  double gamma = 0.0;
  double gamma_star = 0.0;
  std::size_t memory = 1;
  double n_held = 0.0;
  std::size_t group = 0;
};

// Fixed-capacity ring buffer of realized total returns.
class ReturnHistory {
public:
  ReturnHistory() = default;
  explicit ReturnHistory(std::size_t capacity);

  void push(double x);

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return data_.size(); }

  // age 0 is the newest entry.
  double recent(std::size_t age) const;

  // Writes the `m` newest entries into `out`, newest first.
  void copy_recent(std::size_t m, std::span<double> out) const;
  std::vector<double> window(std::size_t m) const;

private:
  std::vector<double> data_;
  std::size_t head_ = 0;  // slot of the next write
  std::size_t size_ = 0;
};

struct MarketState {
  double S = 0.0;
  double D = 0.0;
  ReturnHistory history;
  long t = 0;
};

struct SimulationState {
  std::vector<AgentState> agents;
  MarketState market;
};

double dividend_step(double d_prev, double z);

double stock_return(double s_prev, double s_cur, double d_cur);

// w * (1 + (1 - gamma) r + gamma x)
double wealth_step(double w, double gamma, double r, double x);

/// Derivative of the expected log utility with respect to the investment
/// fraction:
///
///   f(gamma) = (1/m) sum_j (x_j - r) / ((x_j - r) gamma + 1 + r)
///
/// Throws DomainError if any denominator is non-positive.
double utility_derivative(double gamma, std::span<const double> returns, double r);

// Mean of log((1 - gamma)(1 + r) + gamma (1 + x_j)). Used by oracles.
double expected_log_utility(double gamma, std::span<const double> returns, double r);

inline constexpr double kGammaTolerance = 1e-10;

/// Maximizer of the expected log utility over [gamma_min, gamma_max].
///
/// f(gamma_min) <= 0 gives gamma_min (this includes the indifferent case
/// where every x_j equals r), f(gamma_max) >= 0 gives gamma_max, otherwise
/// the interior root of f is bisected to kGammaTolerance.
double optimal_gamma(std::span<const double> returns, double r,
                     double gamma_min = kGammaMin, double gamma_max = kGammaMax);

// Clamp to [0.01, 0.99].
constexpr double cutoff(double x) noexcept {
  return x < kGammaMin ? kGammaMin : (x > kGammaMax ? kGammaMax : x);
}

// cutoff(gamma_star + eps), eps ~ N(0, sigma_gamma) drawn from `stream`.
double apply_gamma_noise(double gamma_star, RngStream& stream, double sigma_gamma);

// Agents at (w0, gamma0, n0) and a Gaussian(mu_h, sigma_h) history of
// max_memory() returns, drawn oldest to newest.
SimulationState init_state(const ModelParams& params, RngStream& stream);

} // namespace lls
