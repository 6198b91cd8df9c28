#pragma once

// Reproducible random numbers.
//
// The generator is counter based: the k-th 64-bit word of a stream is
//
//     mix64(key + (k + 1) * 0x9E3779B97F4A7C15)        (mod 2^64)
//
// where mix64 is the SplitMix64 finaliser (Stafford "variant 13"):
//
//     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//     z =  z ^ (z >> 31)
//
// and key = mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019)). Uniforms on the
// open interval (0,1) are ((word >> 11) + 0.5) * 2^-53. Normal variates use
// the inverse CDF by Acklam's rational approximation (relative error below
// 1.15e-9), one uniform per normal. None of this depends on the platform's
// <random> implementation, so a (seed, stream) pair reproduces the same data
// everywhere.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace subsel {

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Acklam's approximation of the standard normal quantile function, u in (0,1).
double normal_quantile(double u) noexcept;

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on (0,1); never returns 0 or 1.
  double uniform() noexcept;
  double normal() noexcept { return normal_quantile(uniform()); }
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// k distinct values from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace subsel
