#include "lls/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lls/errors.hpp"

namespace lls {

long SimulationConfig::resolved_burn_in() const {
  if (burn_in) return *burn_in;
  const auto depth = static_cast<long>(params.max_memory());
  return depth < params.steps ? depth : 0;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

double to_double(std::string_view v, std::size_t line, std::string_view key) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(line, "malformed number '" + std::string(v) + "' for " + std::string(key));
  }
  return out;
}

std::uint64_t to_u64(std::string_view v, std::size_t line, std::string_view key) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(line,
                      "malformed unsigned integer '" + std::string(v) + "' for " + std::string(key));
  }
  return out;
}

long to_long(std::string_view v, std::size_t line, std::string_view key) {
  long out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(line, "malformed integer '" + std::string(v) + "' for " + std::string(key));
  }
  return out;
}

bool to_bool(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(line, "expected true or false for " + std::string(key));
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return std::string(v);
}

// Memory groups as "count:memory, ..." or a single span for every agent.
struct MemorySpec {
  std::vector<MemoryGroup> groups;
  std::optional<std::size_t> uniform;
};

MemorySpec to_memory(std::string_view v, std::size_t line) {
  MemorySpec spec;
  if (v.find(':') == std::string_view::npos) {
    spec.uniform = to_u64(v, line, "model.memory");
    return spec;
  }
  for (const auto item : split_list(v)) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError(line, "model.memory entries must look like count:memory");
    }
    spec.groups.push_back({to_u64(trim(item.substr(0, colon)), line, "model.memory"),
                           to_u64(trim(item.substr(colon + 1)), line, "model.memory")});
  }
  return spec;
}

const std::vector<std::string_view>& required_model_keys() {
  static const std::vector<std::string_view> keys{
      "model.agents", "model.r",     "model.z1",      "model.z2", "model.sigma_gamma",
      "model.memory", "model.steps", "model.mu_h",    "model.sigma_h", "model.w0",
      "model.n0",     "model.S0",    "model.D0",      "model.gamma0"};
  return keys;
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

} // namespace

SimulationConfig preset_config(std::string_view preset) {
  SimulationConfig c;
  c.preset = std::string(preset);
  if (preset == "lls-basic") {
    c.params = preset_basic();
  } else if (preset == "lls-3groups") {
    c.params = preset_three_groups();
  } else if (preset == "none") {
    c.params = ModelParams{};
  } else {
    throw ConfigError(0, "unknown preset '" + std::string(preset) +
                             "' (expected lls-basic, lls-3groups or none)");
  }
  return c;
}

SimulationConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::string section;
  std::size_t line_no = 0;
  std::string preset = "lls-basic";
  std::size_t preset_line = 0;

  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = raw.find_first_of("#;"); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");

    std::string full = section.empty() || key.find('.') != std::string_view::npos
                           ? std::string(key)
                           : section + "." + std::string(key);
    if (full == "preset") {
      preset = unquote(value);
      preset_line = line_no;
      continue;
    }
    entries.push_back({std::move(full), unquote(value), line_no});
  }

  SimulationConfig c;
  try {
    c = preset_config(preset);
  } catch (const ConfigError& e) {
    throw ConfigError(preset_line, e.what());
  }
  auto& p = c.params;

  std::optional<MemorySpec> memory;
  std::size_t memory_line = 0;
  bool n_total_auto = true;
  std::map<std::string, std::size_t> seen;

  using Setter = std::function<void(std::string_view, std::size_t, std::string_view)>;
  auto real = [](double& field) -> Setter {
    return [&field](std::string_view v, std::size_t l, std::string_view k) {
      field = to_double(v, l, k);
    };
  };
  const std::map<std::string, Setter, std::less<>> setters{
      {"model.agents",
       [&](auto v, auto l, auto k) { p.agents = static_cast<std::size_t>(to_u64(v, l, k)); }},
      {"model.r", real(p.r)},
      {"model.z1", real(p.z1)},
      {"model.z2", real(p.z2)},
      {"model.sigma_gamma", real(p.sigma_gamma)},
      {"model.memory",
       [&](auto v, auto l, auto) {
         memory = to_memory(v, l);
         memory_line = l;
       }},
      {"model.n_total",
       [&](auto v, auto l, auto k) {
         n_total_auto = v == "auto";
         if (!n_total_auto) p.n_total = to_double(v, l, k);
       }},
      {"model.steps", [&](auto v, auto l, auto k) { p.steps = to_long(v, l, k); }},
      {"model.mu_h", real(p.mu_h)},
      {"model.sigma_h", real(p.sigma_h)},
      {"model.w0", real(p.w0)},
      {"model.n0", real(p.n0_per_agent)},
      {"model.S0", real(p.S0)},
      {"model.D0", real(p.D0)},
      {"model.gamma0", real(p.gamma0)},
      {"clearance.mode",
       [&](auto v, auto l, auto) {
         try {
           p.clearance_mode = parse_clearance_mode(v);
         } catch (const ParameterError& e) {
           throw ConfigError(l, e.what());
         }
       }},
      {"clearance.xi", real(p.xi)},
      {"clearance.dividend_lag", [&](auto v, auto l, auto k) { p.dividend_lag = to_bool(v, l, k); }},
      {"clearance.max_expansions",
       [&](auto v, auto l, auto k) { p.max_expansions = static_cast<int>(to_long(v, l, k)); }},
      {"clearance.max_bisections",
       [&](auto v, auto l, auto k) { p.max_bisections = static_cast<int>(to_long(v, l, k)); }},
      {"rng.algorithm",
       [&](auto v, auto l, auto) {
         try {
           c.algorithm = parse_rng_algorithm(v);
         } catch (const ParameterError& e) {
           throw ConfigError(l, e.what());
         }
       }},
      {"rng.seed",
       [&](auto v, auto l, auto k) {
         if (v == "auto") {
           c.seed.reset();
         } else {
           c.seed = to_u64(v, l, k);
         }
       }},
      {"run.replicas",
       [&](auto v, auto l, auto k) {
         c.replicas = static_cast<std::size_t>(to_u64(v, l, k));
         if (c.replicas < 1) throw ConfigError(l, "run.replicas must be at least 1");
       }},
      {"run.burn_in",
       [&](auto v, auto l, auto k) {
         if (v == "auto") {
           c.burn_in.reset();
         } else {
           c.burn_in = to_long(v, l, k);
           if (*c.burn_in < 0) throw ConfigError(l, "run.burn_in must be non-negative");
         }
       }},
      {"run.output_dir", [&](auto v, auto, auto) { c.output_dir = std::string(v); }},
      {"run.crash_threshold", real(c.crash_threshold)},
      {"record.series", [&](auto v, auto l, auto k) { c.record.series = to_bool(v, l, k); }},
      {"record.group_wealth",
       [&](auto v, auto l, auto k) { c.record.group_wealth = to_bool(v, l, k); }},
      {"experiment.agent_counts",
       [&](auto v, auto l, auto k) {
         c.agent_counts.clear();
         for (const auto item : split_list(v)) {
           c.agent_counts.push_back(static_cast<std::size_t>(to_u64(item, l, k)));
         }
       }},
      {"experiment.xis",
       [&](auto v, auto l, auto k) {
         c.xis.clear();
         for (const auto item : split_list(v)) c.xis.push_back(to_double(item, l, k));
       }},
      {"experiment.max_lag",
       [&](auto v, auto l, auto k) { c.max_lag = static_cast<std::size_t>(to_u64(v, l, k)); }},
  };

  for (const auto& e : entries) {
    const auto it = setters.find(e.key);
    if (it == setters.end()) throw ConfigError(e.line, "unknown key '" + e.key + "'");
    it->second(e.value, e.line, e.key);
    seen[e.key] = e.line;
  }

  if (preset == "none") {
    for (const auto key : required_model_keys()) {
      if (!seen.count(std::string(key))) {
        throw ConfigError(preset_line, "preset none requires " + std::string(key));
      }
    }
  }

  if (memory) {
    if (memory->uniform) {
      p.memory_groups = {{p.agents, *memory->uniform}};
    } else {
      p.memory_groups = memory->groups;
      if (!seen.count("model.agents")) {
        p.agents = 0;
        for (const auto& g : p.memory_groups) p.agents += g.count;
      }
    }
  } else if (seen.count("model.agents")) {
    p.memory_groups = scale_groups(p.memory_groups, p.agents);
  }
  if (n_total_auto && (seen.count("model.agents") || seen.count("model.memory") ||
                       seen.count("model.n0") || preset == "none")) {
    p.n_total = static_cast<double>(p.agents) * p.n0_per_agent;
  }

  try {
    validate(p);
  } catch (const ParameterError& e) {
    const std::string msg = e.what();
    std::size_t line = 0;
    for (const auto& [key, l] : seen) {
      if (msg.rfind(key + " ", 0) == 0 || msg.find(key) != std::string::npos) {
        line = std::max(line, l);
      }
    }
    if (line == 0 && msg.find("memory") != std::string::npos) line = memory_line;
    throw ConfigError(line, msg);
  }
  if (c.burn_in && p.steps > 0 && *c.burn_in >= p.steps) {
    throw ConfigError(seen.count("run.burn_in") ? seen["run.burn_in"] : 0,
                      "run.burn_in must be smaller than model.steps");
  }
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const SimulationConfig& c) {
  const auto& p = c.params;
  std::ostringstream out;
  out << "preset = " << c.preset << "\n\n[model]\n";
  out << "agents = " << p.agents << "\n";
  out << "r = " << format_double(p.r) << "\n";
  out << "z1 = " << format_double(p.z1) << "\n";
  out << "z2 = " << format_double(p.z2) << "\n";
  out << "sigma_gamma = " << format_double(p.sigma_gamma) << "\n";
  out << "memory = ";
  for (std::size_t g = 0; g < p.memory_groups.size(); ++g) {
    out << (g ? ", " : "") << p.memory_groups[g].count << ":" << p.memory_groups[g].memory;
  }
  out << "\n";
  out << "n_total = " << format_double(p.n_total) << "\n";
  out << "steps = " << p.steps << "\n";
  out << "mu_h = " << format_double(p.mu_h) << "\n";
  out << "sigma_h = " << format_double(p.sigma_h) << "\n";
  out << "w0 = " << format_double(p.w0) << "\n";
  out << "n0 = " << format_double(p.n0_per_agent) << "\n";
  out << "S0 = " << format_double(p.S0) << "\n";
  out << "D0 = " << format_double(p.D0) << "\n";
  out << "gamma0 = " << format_double(p.gamma0) << "\n";
  out << "\n[clearance]\n";
  out << "mode = " << to_string(p.clearance_mode) << "\n";
  out << "xi = " << format_double(p.xi) << "\n";
  out << "dividend_lag = " << (p.dividend_lag ? "true" : "false") << "\n";
  out << "max_expansions = " << p.max_expansions << "\n";
  out << "max_bisections = " << p.max_bisections << "\n";
  out << "\n[rng]\n";
  out << "algorithm = " << to_string(c.algorithm) << "\n";
  out << "seed = " << (c.seed ? std::to_string(*c.seed) : std::string("auto")) << "\n";
  out << "\n[run]\n";
  out << "replicas = " << c.replicas << "\n";
  out << "burn_in = " << (c.burn_in ? std::to_string(*c.burn_in) : std::string("auto")) << "\n";
  out << "output_dir = " << c.output_dir.string() << "\n";
  out << "crash_threshold = " << format_double(c.crash_threshold) << "\n";
  out << "\n[record]\n";
  out << "series = " << (c.record.series ? "true" : "false") << "\n";
  out << "group_wealth = " << (c.record.group_wealth ? "true" : "false") << "\n";
  if (!c.agent_counts.empty() || !c.xis.empty()) {
    out << "\n[experiment]\n";
    if (!c.agent_counts.empty()) {
      out << "agent_counts = ";
      for (std::size_t i = 0; i < c.agent_counts.size(); ++i) {
        out << (i ? ", " : "") << c.agent_counts[i];
      }
      out << "\n";
    }
    if (!c.xis.empty()) {
      out << "xis = ";
      for (std::size_t i = 0; i < c.xis.size(); ++i) out << (i ? ", " : "") << format_double(c.xis[i]);
      out << "\n";
    }
    out << "max_lag = " << c.max_lag << "\n";
  }
  return out.str();
}

} // namespace lls
