#pragma once

#include <cstdint>

#include "mcslab/nets.hpp"
#include "mcslab/operator.hpp"

namespace mcs {

struct DistortionReport {
  double eps_hat = 0.0;             // over chords and tangent surrogates
  double eps_hat_chords = 0.0;      // chord directions only
  double eps_hat_surrogates = 0.0;  // tangent surrogates only (0 if none)
  Index secant_count = 0;           // directions tested (chords + surrogates)
  Index argmax_first = -1;          // sample indices of the worst direction
  Index argmax_second = -1;
  bool argmax_is_surrogate = false;
};

/// max |‖Phi u‖ - 1| over unit directions stored as columns.
DistortionReport embedding_distortion(const MeasurementOperator& op, const Matrix& directions);
DistortionReport embedding_distortion(const MeasurementOperator& op, const SecantSample& secants);

struct TailReport {
  Index M = 0;
  Index trials = 0;
  double lambda = 0.0;
  double lambda_prime = 0.0;
  double two_sided_frequency = 0.0;  // freq(| ||Phi y|| - 1 | > lambda)
  double two_sided_bound = 0.0;      // 2 exp(-M lambda^2 / 6)
  double two_sided_se = 0.0;
  bool two_sided_pass = false;
  double upper_frequency = 0.0;      // freq(||Phi y|| > 1 + lambda')
  double upper_bound = 0.0;          // exp(-M lambda' / 7)
  double upper_se = 0.0;
  bool upper_pass = false;
  bool pass = false;
};

/// Monte Carlo check of the Gaussian concentration tails for a fixed unit y
/// (y = e_1 in R^N).  Trial t uses the operator stream (seed, t).  Standard
/// errors are binomial at p = min(bound, 1).
TailReport empirical_tail_check(Index M, double lambda, double lambda_prime, Index trials,
                                std::uint64_t seed, Index N = 1, unsigned threads = 1);

}  // namespace mcs
