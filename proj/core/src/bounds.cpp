#include "mcslab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcslab/error.hpp"
#include "mcslab/nets.hpp"

namespace mcs {
namespace {

void check_inputs(int K, double tau, double volume, double epsilon) {
  require(K >= 1, ErrorCode::invalid_argument, "K must be >= 1");
  require(tau > 0.0 && std::isfinite(tau), ErrorCode::invalid_argument,
          "tau must be positive and finite");
  require(volume > 0.0 && std::isfinite(volume), ErrorCode::invalid_argument,
          "volume must be positive and finite");
  require(epsilon > 0.0 && epsilon <= 1.0 / 3.0, ErrorCode::out_of_range,
          "epsilon must lie in (0, 1/3]");
}

double log_sum_exp(const std::vector<double>& logs) {
  const double top = *std::max_element(logs.begin(), logs.end());
  if (std::isinf(top)) return top;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - top);
  return top + std::log(s);
}

}  // namespace

BoundReport required_measurements(int K, double tau, double volume, double epsilon, double rho) {
  check_inputs(K, tau, volume, epsilon);
  require(rho > 0.0 && rho < 1.0, ErrorCode::out_of_range, "rho must lie in (0, 1)");
  BoundReport r;
  r.K = K;
  r.tau = tau;
  r.volume = volume;
  r.epsilon = epsilon;
  r.rho = rho;
  r.assumption_holds = volume_assumption_holds(K, tau, volume);
  r.geometry_term = 24.0 * K +
                    2.0 * K * std::log(std::sqrt(static_cast<double>(K)) / (tau * epsilon * epsilon)) +
                    std::log(2.0 * volume * volume);
  r.probability_term = std::log(8.0 / rho);
  r.probability_branch = r.probability_term > r.geometry_term;
  r.rhs = 18.0 / (epsilon * epsilon) * std::max(r.geometry_term, r.probability_term);
  r.m_min = static_cast<std::int64_t>(std::ceil(r.rhs));
  return r;
}

double chain_weight_sum(int J) {
  double s = 0.0;
  for (int j = 0; j <= J; ++j) s += (j + 1) * std::ldexp(1.0, -j - 2);
  return s;
}

ChainCertificate chaining_failure_bound(int K, double tau, double volume, double epsilon,
                                        std::int64_t M, int J) {
  check_inputs(K, tau, volume, epsilon);
  require(M >= 1, ErrorCode::invalid_argument, "M must be >= 1");
  require(J >= 0, ErrorCode::invalid_argument, "J must be >= 0");
  require(volume_assumption_holds(K, tau, volume), ErrorCode::assumption_violated,
          "volume assumption V/tau^K >= (21/(2 sqrt K))^K fails");

  ChainCertificate c;
  c.epsilon = epsilon;
  c.epsilon1 = 0.9 * epsilon;
  c.delta = epsilon / 160.0;
  c.c1 = std::sqrt(6.0 / 7.0);
  c.c2 = 16.0;
  c.J = J;
  c.M = M;
  const double m = static_cast<double>(M);
  const double ratio_vt = volume / std::pow(tau, K);
  c.log_cover0 = std::log(2.0) +
                 2.0 * K * std::log(6.12 * std::sqrt(static_cast<double>(K)) / (c.delta * c.delta)) +
                 2.0 * std::log(ratio_vt);
  const double log4 = std::log(4.0);

  // Net term: 2 N~_0 * 2 exp(-M eps1^2 / 7).
  c.log_terms.push_back(std::log(4.0) + c.log_cover0 - m * c.epsilon1 * c.epsilon1 / 7.0);
  // Link terms: 2 N~_{j+1}^2 exp(-(2j+1) M / 7), N~_{j+1} = 4^{2(j+1)K} N~_0.
  for (int j = 0; j <= J; ++j) {
    c.log_terms.push_back(std::log(2.0) + 2.0 * c.log_cover0 + 4.0 * (j + 1) * K * log4 -
                          (2.0 * j + 1.0) * m / 7.0);
  }
  for (double l : c.log_terms) c.terms.push_back(std::exp(l));
  const double log_partial = log_sum_exp(c.log_terms);
  c.partial_sum = std::exp(log_partial);

  const double log_ratio = 4.0 * K * log4 - 2.0 * m / 7.0;
  c.ratio = std::exp(log_ratio);
  if (log_ratio < 0.0) {
    const double log_next = std::log(2.0) + 2.0 * c.log_cover0 + 4.0 * (J + 2) * K * log4 -
                            (2.0 * (J + 1) + 1.0) * m / 7.0;
    c.remainder = std::exp(log_next - std::log1p(-c.ratio));
    c.raw_total = std::exp(log_sum_exp({log_partial, log_next - std::log1p(-c.ratio)}));
  } else {
    c.remainder = std::numeric_limits<double>::infinity();
    c.raw_total = c.remainder;
  }
  c.failure_probability = std::min(1.0, c.raw_total);
  c.informative = c.raw_total < 1.0;
  c.closed_form = 8.0 * std::exp(-m * c.epsilon1 * c.epsilon1 / 14.0);
  c.weight_sum = chain_weight_sum(J);
  return c;
}

}  // namespace mcs
