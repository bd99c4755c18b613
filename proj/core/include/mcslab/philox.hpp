#pragma once

#include <array>
#include <cstdint>

namespace mcs {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Output is a pure function of (counter, key); there is no generator state to
// share between threads.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

inline PhiloxKey key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// 53-bit uniform in the open interval (0, 1) built from the first two output words.
double uniform_from_block(const PhiloxCounter& block);

/// Quantile of the standard normal distribution, accurate to full double precision.
double inverse_normal_cdf(double u);

/// Standard normal variate addressed by (seed, trial, row, column).  The
/// counter layout is {trial_lo, trial_hi, row, column}.
double gaussian_at(std::uint64_t seed, std::uint64_t trial, std::uint32_t row,
                   std::uint32_t column);

/// Sequential stream on top of Philox for auxiliary sampling (pair selection,
/// random directions).  Streams are separated from operator entries by
/// reserving column word 0xFFFFFFFF.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t stream);

  std::uint64_t next_u64();
  double uniform();  // (0, 1)
  double normal();
  /// Uniform integer in [0, bound).  bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  PhiloxKey key_;
  std::uint32_t stream_;
  std::uint64_t index_ = 0;
};

}  // namespace mcs
