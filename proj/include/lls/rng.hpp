#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace lls {

enum class RngAlgorithm { MersenneHQ, Randu };

std::string_view to_string(RngAlgorithm alg) noexcept;

// Accepts "mersenne" or "randu"; anything else is a ParameterError.
RngAlgorithm parse_rng_algorithm(std::string_view name);

inline constexpr std::uint32_t kRanduModulusMask = 0x7FFFFFFFu;  // 2^31 - 1
inline constexpr std::uint64_t kRanduMultiplier = 65539u;

// One RANDU step, x' = 65539 x mod 2^31. The returned state is also the
// output value. Odd inputs stay odd.
constexpr std::uint32_t randu_next(std::uint32_t state) noexcept {
  return static_cast<std::uint32_t>((kRanduMultiplier * state) & kRanduModulusMask);
}

// Initial RANDU state for a seed: low 31 bits with the lowest bit forced on.
constexpr std::uint32_t randu_initial_state(std::uint64_t seed) noexcept {
  return static_cast<std::uint32_t>(seed & kRanduModulusMask) | 1u;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed for replica k of a run seeded with `base`.
std::uint64_t replica_seed(std::uint64_t base, std::uint64_t replica) noexcept;

// OS entropy (std::random_device), falling back to the wall clock.
std::uint64_t entropy_seed();

/// Deterministic pseudo-random stream.
///
/// The output sequence is a pure function of (algorithm, seed) and the draw
/// index. MersenneHQ is MT19937-64; Randu is the 31-bit RANDU generator
/// emulated with 32-bit arithmetic regardless of the host word size.
///
/// Gaussian deviates come from the Marsaglia polar method. Each accepted
/// pair is consumed in order (first value returned, second cached), so the
/// number of uniform draws is a function of the uniform sequence alone.
///
/// A stream is single-owner state; do not share one between threads.
class RngStream {
public:
  RngStream(RngAlgorithm algorithm, std::uint64_t seed);

  RngAlgorithm algorithm() const noexcept { return algorithm_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // Number of raw integer draws taken so far.
  std::uint64_t draws() const noexcept { return draws_; }

  // Current RANDU state (meaningless for MersenneHQ).
  std::uint32_t randu_state() const noexcept { return randu_; }

  // Raw generator output: a 31-bit value for Randu, 64 bits for MersenneHQ.
  std::uint64_t next_raw();

  // Uniform in [0, 1). Randu: state / 2^31. MersenneHQ: the top 53 bits of
  // the 64-bit output scaled by 2^-53, i.e. output / 2^64 truncated to
  // double precision so that the value never rounds up to 1.
  double next_uniform01();

  // a + (b - a) * next_uniform01(). One draw is consumed even when a == b.
  double next_uniform(double a, double b);

  double next_standard_normal();

  // mu + sigma * z. sigma == 0 returns mu exactly but still advances the
  // stream as if a deviate had been produced.
  double next_gaussian(double mu, double sigma);

private:
  RngAlgorithm algorithm_;
  std::uint64_t seed_;
  std::mt19937_64 mt_;
  std::uint32_t randu_ = 1;
  std::uint64_t draws_ = 0;
  std::optional<double> spare_normal_;
};

inline RngStream seed_stream(RngAlgorithm algorithm, std::uint64_t seed) {
  return RngStream(algorithm, seed);
}

} // namespace lls
