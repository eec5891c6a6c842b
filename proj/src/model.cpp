#include "lls/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lls/errors.hpp"

namespace lls {

std::string_view to_string(ClearanceMode mode) noexcept {
  return mode == ClearanceMode::Explicit ? "explicit" : "iterative";
}

ClearanceMode parse_clearance_mode(std::string_view name) {
  if (name == "explicit") return ClearanceMode::Explicit;
  if (name == "iterative") return ClearanceMode::Iterative;
  throw ParameterError("unknown clearance mode '" + std::string(name) +
                       "' (expected explicit or iterative)");
}

std::size_t ModelParams::max_memory() const noexcept {
  std::size_t m = 0;
  for (const auto& g : memory_groups) m = std::max(m, g.memory);
  return m;
}

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw ParameterError(message);
}

} // namespace

void validate(const ModelParams& p) {
  require(p.agents >= 1, "model.agents must be at least 1");
  require(p.r > 0.0 && p.r < 1.0, "model.r must lie in (0, 1)");
  require(p.z1 <= p.z2, "model.z1 must not exceed model.z2");
  require(p.z1 > -1.0, "model.z1 must exceed -1");
  require(p.sigma_gamma >= 0.0, "model.sigma_gamma must be non-negative");
  require(!p.memory_groups.empty(), "at least one memory group is required");
  std::size_t total = 0;
  for (const auto& g : p.memory_groups) {
    require(g.memory >= 1, "every memory span must be at least 1");
    total += g.count;
  }
  require(total == p.agents, "memory group counts must sum to model.agents");
  require(p.n_total > 0.0, "model.n_total must be positive");
  require(p.steps >= 0, "model.steps must be non-negative");
  require(p.S0 > 0.0, "model.S0 must be positive");
  require(p.D0 >= 0.0, "model.D0 must be non-negative");
  require(p.w0 > 0.0, "model.w0 must be positive");
  require(p.n0_per_agent >= 0.0, "model.n0 must be non-negative");
  require(p.sigma_h >= 0.0, "model.sigma_h must be non-negative");
  require(p.gamma_min > 0.0 && p.gamma_min < p.gamma_max && p.gamma_max < 1.0,
          "gamma bounds must satisfy 0 < gamma_min < gamma_max < 1");
  require(p.gamma0 >= p.gamma_min && p.gamma0 <= p.gamma_max,
          "model.gamma0 must lie in [0.01, 0.99]");
  require(p.clearance_mode != ClearanceMode::Iterative || p.xi > 0.0,
          "clearance.xi must be positive in iterative mode");
  require(p.max_expansions >= 1 && p.max_bisections >= 1,
          "clearance iteration limits must be positive");
}

ModelParams preset_basic() {
  return ModelParams{};
}

ModelParams preset_three_groups() {
  ModelParams p;
  p.agents = 99;
  p.memory_groups = {{33, 10}, {33, 141}, {33, 256}};
  p.sigma_gamma = 0.2;
  p.r = 0.0001;
  p.z1 = p.z2 = 0.00015;
  p.steps = 20000;
  p.D0 = 0.004;
  p.n_total = 99 * p.n0_per_agent;
  return p;
}

std::vector<MemoryGroup> scale_groups(std::span<const MemoryGroup> groups, std::size_t agents) {
  std::vector<MemoryGroup> out(groups.begin(), groups.end());
  std::size_t old_total = 0;
  for (const auto& g : groups) old_total += g.count;
  if (out.empty() || old_total == 0) return out;

  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t scaled = groups[i].count * agents;
    out[i].count = scaled / old_total;
    assigned += out[i].count;
    remainders.emplace_back(scaled % old_total, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < agents; ++k, ++assigned) {
    ++out[remainders[k % remainders.size()].second].count;
  }
  return out;
}

ReturnHistory::ReturnHistory(std::size_t capacity) : data_(capacity, 0.0) {}

void ReturnHistory::push(double x) {
  if (data_.empty()) return;
  data_[head_] = x;
  head_ = (head_ + 1) % data_.size();
  size_ = std::min(size_ + 1, data_.size());
}

double ReturnHistory::recent(std::size_t age) const {
  if (age >= size_) throw ParameterError("return history is shorter than the requested age");
  const std::size_t cap = data_.size();
  return data_[(head_ + cap - 1 - age) % cap];
}

void ReturnHistory::copy_recent(std::size_t m, std::span<double> out) const {
  if (m > size_ || out.size() < m) {
    throw ParameterError("return history is shorter than the memory span");
  }
  const std::size_t cap = data_.size();
  std::size_t slot = (head_ + cap - 1) % cap;
  for (std::size_t j = 0; j < m; ++j) {
    out[j] = data_[slot];
    slot = slot == 0 ? cap - 1 : slot - 1;
  }
}

std::vector<double> ReturnHistory::window(std::size_t m) const {
  std::vector<double> out(m);
  copy_recent(m, out);
  return out;
}

double dividend_step(double d_prev, double z) {
  if (z <= -1.0) throw ParameterError("dividend growth z must exceed -1");
  if (d_prev < 0.0) throw ParameterError("dividend must be non-negative");
  return (1.0 + z) * d_prev;
}

double stock_return(double s_prev, double s_cur, double d_cur) {
  if (!(s_prev > 0.0)) throw ParameterError("previous price must be positive");
  return (s_cur - s_prev + d_cur) / s_prev;
}

double wealth_step(double w, double gamma, double r, double x) {
  return w * (1.0 + (1.0 - gamma) * r + gamma * x);
}

double utility_derivative(double gamma, std::span<const double> returns, double r) {
  if (returns.empty()) throw ParameterError("utility_derivative: empty return window");
  double sum = 0.0;
  for (const double x : returns) {
    const double excess = x - r;
    const double denom = excess * gamma + 1.0 + r;
    if (!(denom > 0.0)) {
      throw DomainError("utility_derivative: non-positive denominator (return <= -1 in history)");
    }
    sum += excess / denom;
  }
  return sum / static_cast<double>(returns.size());
}

double expected_log_utility(double gamma, std::span<const double> returns, double r) {
  double sum = 0.0;
  for (const double x : returns) {
    sum += std::log((1.0 - gamma) * (1.0 + r) + gamma * (1.0 + x));
  }
  return sum / static_cast<double>(returns.size());
}

double optimal_gamma(std::span<const double> returns, double r, double gamma_min,
                     double gamma_max) {
  if (utility_derivative(gamma_min, returns, r) <= 0.0) return gamma_min;
  if (utility_derivative(gamma_max, returns, r) >= 0.0) return gamma_max;

  // f(lo) > 0 > f(hi), f strictly decreasing
  double lo = gamma_min;
  double hi = gamma_max;
  while (hi - lo > kGammaTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (utility_derivative(mid, returns, r) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double apply_gamma_noise(double gamma_star, RngStream& stream, double sigma_gamma) {
  return cutoff(gamma_star + stream.next_gaussian(0.0, sigma_gamma));
}

SimulationState init_state(const ModelParams& params, RngStream& stream) {
  std::size_t total = 0;
  for (const auto& g : params.memory_groups) total += g.count;
  if (total != params.agents) {
    throw ConfigError(0, "memory group counts sum to " + std::to_string(total) +
                             " but model.agents is " + std::to_string(params.agents));
  }
  validate(params);

  SimulationState state;
  state.agents.reserve(params.agents);
  for (std::size_t g = 0; g < params.memory_groups.size(); ++g) {
    const auto& group = params.memory_groups[g];
    for (std::size_t i = 0; i < group.count; ++i) {
      state.agents.push_back(AgentState{params.w0, params.gamma0, params.gamma0, group.memory,
                                        params.n0_per_agent, g});
    }
  }

  const std::size_t depth = params.max_memory();
  state.market.S = params.S0;
  state.market.D = params.D0;
  state.market.t = 0;
  state.market.history = ReturnHistory(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    state.market.history.push(stream.next_gaussian(params.mu_h, params.sigma_h));
  }
  return state;
}

} // namespace lls
