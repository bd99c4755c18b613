#include "mcslab/philox.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/erf.hpp>

#include "mcslab/error.hpp"

namespace mcs {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

double uniform_from_block(const PhiloxCounter& block) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(block[0]) << 32) | block[1]) >> 11;
  // (bits + 0.5) / 2^53 rounds to 1 for the top value; clamp to the largest double below 1.
  return std::min((static_cast<double>(bits) + 0.5) * 0x1.0p-53, 1.0 - 0x1.0p-53);
}

double inverse_normal_cdf(double u) {
  require(u > 0.0 && u < 1.0, ErrorCode::out_of_range, "inverse_normal_cdf needs u in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double gaussian_at(std::uint64_t seed, std::uint64_t trial, std::uint32_t row,
                   std::uint32_t column) {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(trial),
                          static_cast<std::uint32_t>(trial >> 32), row, column};
  return inverse_normal_cdf(uniform_from_block(philox4x32_10(ctr, key_from_seed(seed))));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint32_t stream)
    : key_(key_from_seed(seed)), stream_(stream) {}

std::uint64_t CounterRng::next_u64() {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(index_),
                          static_cast<std::uint32_t>(index_ >> 32), stream_, 0xFFFFFFFFu};
  ++index_;
  const auto out = philox4x32_10(ctr, key_);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return inverse_normal_cdf(uniform()); }

std::uint64_t CounterRng::below(std::uint64_t bound) {
  require(bound > 0, ErrorCode::invalid_argument, "CounterRng::below needs a positive bound");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
  std::uint64_t value = next_u64();
  while (value >= limit) value = next_u64();
  return value % bound;
}

}  // namespace mcs
