#include "mcslab/distortion.hpp"

#include <algorithm>
#include <cmath>

#include "mcslab/error.hpp"
#include "mcslab/parallel.hpp"
#include "mcslab/philox.hpp"

namespace mcs {
namespace {

void check_unit(const Matrix& d) {
  for (Index c = 0; c < d.cols(); ++c) {
    require(std::abs(d.col(c).norm() - 1.0) <= 1e-12, ErrorCode::invalid_argument,
            "secant direction " + std::to_string(c) + " is not unit norm");
  }
}

// Largest deviation and its column.
std::pair<double, Index> worst(const MeasurementOperator& op, const Matrix& d) {
  if (d.cols() == 0) return {0.0, -1};
  require(d.rows() == op.cols(), ErrorCode::invalid_argument,
          "secant dimension does not match the operator");
  const Vector dev = ((op.matrix() * d).colwise().norm().array() - 1.0).abs().transpose();
  Index at = 0;
  const double value = dev.maxCoeff(&at);
  return {value, at};
}

}  // namespace

DistortionReport embedding_distortion(const MeasurementOperator& op, const Matrix& directions) {
  require(directions.cols() > 0, ErrorCode::invalid_argument, "secant set is empty");
  check_unit(directions);
  DistortionReport r;
  const auto [value, at] = worst(op, directions);
  r.eps_hat = r.eps_hat_chords = value;
  r.secant_count = directions.cols();
  r.argmax_first = at;
  return r;
}

DistortionReport embedding_distortion(const MeasurementOperator& op, const SecantSample& s) {
  require(s.size() > 0, ErrorCode::invalid_argument, "secant set is empty");
  check_unit(s.directions);
  check_unit(s.surrogates);
  DistortionReport r;
  const auto [chord_value, chord_at] = worst(op, s.directions);
  const auto [surr_value, surr_at] = worst(op, s.surrogates);
  r.eps_hat_chords = chord_value;
  r.eps_hat_surrogates = surr_value;
  r.secant_count = s.directions.cols() + s.surrogates.cols();
  if (surr_at >= 0 && surr_value > chord_value) {
    r.eps_hat = surr_value;
    const Index source = s.surrogate_of[static_cast<std::size_t>(surr_at)];
    r.argmax_first = s.first[static_cast<std::size_t>(source)];
    r.argmax_second = s.second[static_cast<std::size_t>(source)];
    r.argmax_is_surrogate = true;
  } else {
    r.eps_hat = chord_value;
    r.argmax_first = s.first[static_cast<std::size_t>(chord_at)];
    r.argmax_second = s.second[static_cast<std::size_t>(chord_at)];
  }
  return r;
}

TailReport empirical_tail_check(Index M, double lambda, double lambda_prime, Index trials,
                                std::uint64_t seed, Index N, unsigned threads) {
  require(M >= 1 && N >= 1, ErrorCode::invalid_argument, "operator dimensions must be positive");
  require(lambda > 0.0 && lambda <= 1.0 / 3.0, ErrorCode::out_of_range,
          "lambda must lie in (0, 1/3]");
  require(lambda_prime >= 0.2, ErrorCode::out_of_range, "lambda' must be >= 1/5");
  require(trials >= 1000, ErrorCode::invalid_argument, "tail check needs at least 1000 trials");

  std::vector<char> two_sided(static_cast<std::size_t>(trials)), upper(two_sided.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  parallel_for(two_sided.size(), threads, [&](std::size_t t) {
    // Phi e_1 is the first column of the trial-t operator.
    double sq = 0.0;
    for (Index r = 0; r < M; ++r) {
      const double g = scale * gaussian_at(seed, t, static_cast<std::uint32_t>(r), 0);
      sq += g * g;
    }
    const double norm = std::sqrt(sq);
    two_sided[t] = std::abs(norm - 1.0) > lambda;
    upper[t] = norm > 1.0 + lambda_prime;
  });

  TailReport r;
  r.M = M;
  r.trials = trials;
  r.lambda = lambda;
  r.lambda_prime = lambda_prime;
  const double n = static_cast<double>(trials);
  auto se = [n](double bound) {
    const double p = std::min(bound, 1.0);
    return std::sqrt(p * (1.0 - p) / n);
  };
  r.two_sided_frequency = std::count(two_sided.begin(), two_sided.end(), 1) / n;
  r.two_sided_bound = 2.0 * std::exp(-static_cast<double>(M) * lambda * lambda / 6.0);
  r.two_sided_se = se(r.two_sided_bound);
  r.two_sided_pass = r.two_sided_frequency <= r.two_sided_bound + 3.0 * r.two_sided_se;
  r.upper_frequency = std::count(upper.begin(), upper.end(), 1) / n;
  r.upper_bound = std::exp(-static_cast<double>(M) * lambda_prime / 7.0);
  r.upper_se = se(r.upper_bound);
  r.upper_pass = r.upper_frequency <= r.upper_bound + 3.0 * r.upper_se;
  r.pass = r.two_sided_pass && r.upper_pass;
  return r;
}

}  // namespace mcs
