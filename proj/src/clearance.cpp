#include "lls/clearance.hpp"

#include <cmath>
#include <sstream>

#include "lls/analysis.hpp"
#include "lls/errors.hpp"

namespace lls {

WealthLinear linearize_wealth(const AgentState& agent, double s_prev, double d_cur, double r) {
  const double g = agent.gamma;
  return {agent.w * (1.0 + (1.0 - g) * r + g * (d_cur - s_prev) / s_prev), agent.w * g / s_prev};
}

std::vector<WealthLinear> linearize_wealth(std::span<const AgentState> agents, double s_prev,
                                           double d_cur, double r) {
  std::vector<WealthLinear> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(linearize_wealth(a, s_prev, d_cur, r));
  return out;
}

double excess_demand(double s_h, std::span<const double> gammas,
                     std::span<const WealthLinear> wealth, double n_total) {
  if (!(s_h > 0.0)) throw ParameterError("excess_demand: price must be positive");
  if (gammas.size() != wealth.size()) {
    throw ParameterError("excess_demand: gamma and wealth lists differ in length");
  }
  double demand = 0.0;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    demand += gammas[i] * (wealth[i].a / s_h + wealth[i].b);
  }
  return demand - n_total;
}

ClearanceResult solve_price_explicit(std::span<const double> gammas_new,
                                     std::span<const WealthLinear> wealth, double n_total) {
  if (gammas_new.size() != wealth.size()) {
    throw ParameterError("solve_price_explicit: gamma and wealth lists differ in length");
  }
  double num = 0.0;
  double slope = 0.0;
  for (std::size_t i = 0; i < gammas_new.size(); ++i) {
    num += gammas_new[i] * wealth[i].a;
    slope += gammas_new[i] * wealth[i].b;
  }
  const double denom = 1.0 - slope / n_total;
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "explicit clearing failed: non-positive denominator " << denom
        << " (aggregate gamma' gamma w / S = " << slope << ", n = " << n_total << ")";
    throw ClearanceError(msg.str());
  }
  const double price = (num / n_total) / denom;
  if (!(price > 0.0) || !std::isfinite(price)) {
    std::ostringstream msg;
    msg << "explicit clearing failed: price " << price << " (aggregate gamma' a = " << num << ")";
    throw ClearanceError(msg.str());
  }
  const double residual = excess_demand(price, gammas_new, wealth, n_total);
  if (!(std::abs(residual) <= kExplicitResidualScale * n_total)) {
    std::ostringstream msg;
    msg << "explicit clearing failed: residual " << residual << " at price " << price;
    throw ClearanceError(msg.str());
  }
  return {price, residual, 0, ClearanceMode::Explicit};
}

ClearanceResult solve_price_explicit(std::span<const double> gammas_new,
                                     std::span<const AgentState> agents_prev, double s_prev,
                                     double d_cur, double r, double n_total) {
  const auto wealth = linearize_wealth(agents_prev, s_prev, d_cur, r);
  return solve_price_explicit(gammas_new, wealth, n_total);
}

namespace {

// Excess demand of the re-optimizing market, evaluated on per-group
// aggregates since all members of a group share one memory window.
class HypotheticalMarket {
public:
  HypotheticalMarket(std::span<const AgentState> agents, const MarketState& market, double d_cur,
                     const ModelParams& params)
      : s_prev_(market.S), d_cur_(d_cur), r_(params.r),
        n_total_(params.n_total), gamma_min_(params.gamma_min), gamma_max_(params.gamma_max),
        wealth_(params.group_count()), gamma_(params.group_count()),
        windows_(params.group_count()) {
    for (const auto& agent : agents) {
      const auto lin = linearize_wealth(agent, s_prev_, d_cur_, r_);
      wealth_[agent.group].a += lin.a;
      wealth_[agent.group].b += lin.b;
    }
    for (std::size_t g = 0; g < windows_.size(); ++g) {
      windows_[g] = market.history.window(params.memory_groups[g].memory);
    }
  }

  double operator()(double s_h) {
    const double x_h = (s_h - s_prev_ + d_cur_) / s_prev_;
    for (std::size_t g = 0; g < windows_.size(); ++g) {
      auto& window = windows_[g];
      window[0] = x_h;
      gamma_[g] = optimal_gamma(window, r_, gamma_min_, gamma_max_);
    }
    return excess_demand(s_h, gamma_, wealth_, n_total_);
  }

  const std::vector<double>& group_gamma() const noexcept { return gamma_; }

private:
  double s_prev_;
  double d_cur_;
  double r_;
  double n_total_;
  double gamma_min_;
  double gamma_max_;
  std::vector<WealthLinear> wealth_;
  std::vector<double> gamma_;
  std::vector<std::vector<double>> windows_;
};

} // namespace

IterativeResult solve_price_iterative(std::span<const AgentState> agents, const MarketState& market,
                                      double d_cur, const ModelParams& params) {
  if (!(params.xi > 0.0)) throw ParameterError("solve_price_iterative: xi must be positive");
  HypotheticalMarket excess(agents, market, d_cur, params);
  const double xi = params.xi;

  auto accept = [&](double price, double residual, int iterations) {
    IterativeResult out;
    out.group_gamma_star = excess.group_gamma();
    out.gamma_star.reserve(agents.size());
    for (const auto& a : agents) out.gamma_star.push_back(out.group_gamma_star[a.group]);
    out.clearance = {price, residual, iterations, ClearanceMode::Iterative};
    return out;
  };

  int iterations = 0;
  const double s_prev = market.S;
  double ed_start = excess(s_prev);
  if (std::abs(ed_start) <= xi) return accept(s_prev, ed_start, 0);

  // Excess demand is positive below the root and negative above it.
  double lo = s_prev;
  double hi = s_prev;
  const bool root_above = ed_start > 0.0;
  double ed = ed_start;
  int expansions = 0;
  for (;;) {
    if (expansions == params.max_expansions) {
      std::ostringstream msg;
      msg << "iterative clearing failed: no sign change within " << expansions
          << " bracket expansions from S = " << s_prev << " (last excess demand " << ed << ")";
      throw ClearanceError(msg.str());
    }
    ++expansions;
    ++iterations;
    const double probe = root_above ? hi * 2.0 : lo * 0.5;
    ed = excess(probe);
    if (std::abs(ed) <= xi) return accept(probe, ed, iterations);
    if (root_above) {
      lo = hi;
      hi = probe;
      if (ed < 0.0) break;
    } else {
      hi = lo;
      lo = probe;
      if (ed > 0.0) break;
    }
  }

  for (int k = 0; k < params.max_bisections; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++iterations;
    ed = excess(mid);
    if (std::abs(ed) <= xi) return accept(mid, ed, iterations);
    if (ed > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "iterative clearing failed: |excess demand| <= " << xi << " not reached on ["
      << lo << ", " << hi << "] (last excess demand " << ed << ")";
  throw ClearanceError(msg.str());
}

StepRecord simulation_step(SimulationState& state, const ModelParams& params, RngStream& stream) {
  auto& agents = state.agents;
  auto& market = state.market;
  const std::size_t n_agents = agents.size();
  const long step = market.t + 1;

  const double z = stream.next_uniform(params.z1, params.z2);
  const double d_new = dividend_step(market.D, z);

  StepRecord rec;
  rec.t = step;

  std::vector<double> gamma_star(n_agents);
  if (params.clearance_mode == ClearanceMode::Explicit) {
    std::vector<double> group_gamma(params.group_count());
    std::vector<double> window(params.max_memory());
    for (std::size_t g = 0; g < group_gamma.size(); ++g) {
      const std::size_t m = params.memory_groups[g].memory;
      market.history.copy_recent(m, window);
      group_gamma[g] =
          optimal_gamma(std::span<const double>(window).first(m), params.r, params.gamma_min,
                        params.gamma_max);
    }
    for (std::size_t i = 0; i < n_agents; ++i) gamma_star[i] = group_gamma[agents[i].group];
  } else {
    auto search = solve_price_iterative(agents, market, d_new, params);
    gamma_star = std::move(search.gamma_star);
    rec.search_residual = search.clearance.residual;
    rec.iterations = search.clearance.iterations;
  }

  std::vector<double> gamma(n_agents);
  for (std::size_t i = 0; i < n_agents; ++i) {
    gamma[i] = apply_gamma_noise(gamma_star[i], stream, params.sigma_gamma);
  }

  const double d_price = params.dividend_lag ? market.D : d_new;
  const auto cleared = solve_price_explicit(gamma, agents, market.S, d_price, params.r,
                                            params.n_total);
  const double s_new = cleared.price;
  const double x = stock_return(market.S, s_new, d_new);
  if (!std::isfinite(s_new) || !std::isfinite(x)) {
    throw NumericError(step, "non-finite price or return");
  }

  std::vector<double> w_new(n_agents);
  double held = 0.0;
  for (std::size_t i = 0; i < n_agents; ++i) {
    w_new[i] = wealth_step(agents[i].w, agents[i].gamma, params.r, x);
    if (!std::isfinite(w_new[i]) || !(w_new[i] > 0.0)) {
      throw NumericError(step, "wealth of agent " + std::to_string(i) + " is " +
                                   std::to_string(w_new[i]));
    }
    held += gamma[i] * w_new[i] / s_new;
  }

  double sum_star = 0.0;
  double sum_gamma = 0.0;
  for (std::size_t i = 0; i < n_agents; ++i) {
    agents[i].w = w_new[i];
    agents[i].gamma = gamma[i];
    agents[i].gamma_star = gamma_star[i];
    agents[i].n_held = gamma[i] * w_new[i] / s_new;
    sum_star += gamma_star[i];
    sum_gamma += gamma[i];
  }
  market.history.push(x);
  market.S = s_new;
  market.D = d_new;
  market.t = step;

  rec.S = s_new;
  rec.D = d_new;
  rec.x = x;
  rec.mean_gamma_star = sum_star / static_cast<double>(n_agents);
  rec.mean_gamma = sum_gamma / static_cast<double>(n_agents);
  rec.d_gamma = d_gamma(gamma_star, gamma);
  rec.residual = held - params.n_total;
  return rec;
}

} // namespace lls
