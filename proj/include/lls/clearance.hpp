#pragma once

#include <span>
#include <vector>

#include "lls/model.hpp"
#include "lls/rng.hpp"

namespace lls {

// Hypothetical end-of-step wealth as a function of the candidate price:
// w(S_h) = a + b * S_h.
struct WealthLinear {
  double a = 0.0;
  double b = 0.0;
};

/// a = w (1 + (1 - gamma_old) r + gamma_old (D_cur - S_prev) / S_prev)
/// b = w gamma_old / S_prev
WealthLinear linearize_wealth(const AgentState& agent, double s_prev, double d_cur, double r);
std::vector<WealthLinear> linearize_wealth(std::span<const AgentState> agents, double s_prev,
                                           double d_cur, double r);

struct ClearanceResult {
  double price = 0.0;
  double residual = 0.0;  // excess stock demand at `price`
  int iterations = 0;
  ClearanceMode mode = ClearanceMode::Explicit;
};

// sum_i gamma_i (a_i + b_i S_h) / S_h - n_total
double excess_demand(double s_h, std::span<const double> gammas,
                     std::span<const WealthLinear> wealth, double n_total);

inline constexpr double kExplicitResidualScale = 1e-9;

/// Closed-form clearing price for fixed investment fractions:
///
///   S = (sum gamma_i a_i / n) / (1 - sum gamma_i b_i / n)
///
/// Throws ClearanceError when the denominator or the price is non-positive
/// or when |excess demand| at the price exceeds 1e-9 n.
ClearanceResult solve_price_explicit(std::span<const double> gammas_new,
                                     std::span<const WealthLinear> wealth, double n_total);

ClearanceResult solve_price_explicit(std::span<const double> gammas_new,
                                     std::span<const AgentState> agents_prev, double s_prev,
                                     double d_cur, double r, double n_total);

struct IterativeResult {
  std::vector<double> gamma_star;        // per agent, at the accepted price
  std::vector<double> group_gamma_star;  // per memory group
  ClearanceResult clearance;             // price is the accepted S_h
};

/// Searches for a hypothetical price S_h with |excess demand| <= xi, where
/// every agent re-optimizes at each candidate price using its memory window
/// with the newest entry replaced by the hypothetical return
/// (S_h - S_prev + D_cur) / S_prev.
///
/// S_prev itself is tried first. Otherwise the bracket is grown from S_prev
/// by factors of 2 (or 1/2) until excess demand changes sign and then
/// bisected. Throws ClearanceError when no sign change appears within
/// params.max_expansions or xi is not met within params.max_bisections.
IterativeResult solve_price_iterative(std::span<const AgentState> agents, const MarketState& market,
                                      double d_cur, const ModelParams& params);

struct StepRecord {
  long t = 0;                    // index of the completed step, from 1
  double S = 0.0;
  double D = 0.0;
  double x = 0.0;                // realized total return
  double mean_gamma_star = 0.0;
  double mean_gamma = 0.0;
  double d_gamma = 0.0;
  double residual = 0.0;         // sum n_held - n after the step
  double search_residual = 0.0;  // excess demand at the accepted S_h (iterative)
  int iterations = 0;
};

/// Advances the market by one step:
///  1. dividend growth z ~ U[z1, z2]
///  2. optimal fractions (from the completed history, or the iterative search)
///  3. per-agent noise, in agent order
///  4. explicit clearing price for the noised fractions
///  5-7. realized return, wealth and holdings
///  8. history push, t + 1
/// Throws ClearanceError or NumericError; `state` is left untouched on error.
StepRecord simulation_step(SimulationState& state, const ModelParams& params, RngStream& stream);

} // namespace lls
