#include "lls/rng.hpp"

#include <chrono>
#include <cmath>

#include "lls/errors.hpp"

namespace lls {

std::string_view to_string(RngAlgorithm alg) noexcept {
  switch (alg) {
    case RngAlgorithm::MersenneHQ: return "mersenne";
    case RngAlgorithm::Randu: return "randu";
  }
  return "unknown";
}

RngAlgorithm parse_rng_algorithm(std::string_view name) {
  if (name == "mersenne") return RngAlgorithm::MersenneHQ;
  if (name == "randu") return RngAlgorithm::Randu;
  throw ParameterError("unknown rng algorithm '" + std::string(name) +
                       "' (expected mersenne or randu)");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t base, std::uint64_t replica) noexcept {
  return splitmix64(base + replica);
}

std::uint64_t entropy_seed() {
  try {
    std::random_device dev;
    const std::uint64_t hi = dev();
    const std::uint64_t lo = dev();
    return (hi << 32) ^ lo;
  } catch (const std::exception&) {
    // no entropy device; fall through to the clock
  }
  const auto now = std::chrono::high_resolution_clock::now().time_since_epoch().count();
  return splitmix64(static_cast<std::uint64_t>(now));
}

RngStream::RngStream(RngAlgorithm algorithm, std::uint64_t seed)
    : algorithm_(algorithm), seed_(seed) {
  if (algorithm_ == RngAlgorithm::MersenneHQ) {
    mt_.seed(seed);
  } else {
    randu_ = randu_initial_state(seed);
  }
}

std::uint64_t RngStream::next_raw() {
  ++draws_;
  if (algorithm_ == RngAlgorithm::Randu) {
    randu_ = randu_next(randu_);
    return randu_;
  }
  return mt_();
}

double RngStream::next_uniform01() {
  const std::uint64_t raw = next_raw();
  if (algorithm_ == RngAlgorithm::Randu) {
    return static_cast<double>(raw) * 0x1p-31;
  }
  return static_cast<double>(raw >> 11) * 0x1p-53;
}

double RngStream::next_uniform(double a, double b) {
  if (a > b) {
    throw ParameterError("next_uniform: lower bound exceeds upper bound");
  }
  const double u = next_uniform01();
  return a == b ? a : a + (b - a) * u;
}

double RngStream::next_standard_normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double v1 = 0.0;
  double v2 = 0.0;
  double s = 0.0;
  do {
    v1 = 2.0 * next_uniform01() - 1.0;
    v2 = 2.0 * next_uniform01() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v2 * factor;
  return v1 * factor;
}

double RngStream::next_gaussian(double mu, double sigma) {
  if (sigma < 0.0) {
    throw ParameterError("next_gaussian: negative standard deviation");
  }
  const double z = next_standard_normal();
  return sigma == 0.0 ? mu : mu + sigma * z;
}

} // namespace lls
