#pragma once

#include <cstdint>
#include <vector>

namespace mcs {

struct BoundReport {
  int K = 1;
  double tau = 0.0;
  double volume = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;
  bool assumption_holds = false;  // V / tau^K >= (21 / (2 sqrt K))^K
  double geometry_term = 0.0;     // 24K + 2K ln(sqrt(K) / (tau eps^2)) + ln(2 V^2)
  double probability_term = 0.0;  // ln(8 / rho)
  bool probability_branch = false;
  double rhs = 0.0;  // 18 eps^-2 max(geometry_term, probability_term)
  std::int64_t m_min = 0;
};

/// Number of Gaussian measurements that embeds a K-dimensional manifold with
/// reach tau and volume V with isometry constant eps, except with probability
/// rho.  Natural logarithms.  A failed volume assumption is reported in the
/// result, not thrown.
BoundReport required_measurements(int K, double tau, double volume, double epsilon, double rho);

struct ChainCertificate {
  double epsilon = 0.0;
  double epsilon1 = 0.0;  // 9 eps / 10
  double delta = 0.0;     // eps / 160
  double c1 = 0.0;        // sqrt(6/7)
  double c2 = 16.0;
  int J = 0;
  std::int64_t M = 0;
  double log_cover0 = 0.0;       // ln N~_0(delta)
  std::vector<double> terms;     // [net term, link term j = 0..J]
  std::vector<double> log_terms;
  double partial_sum = 0.0;      // sum of `terms`
  double ratio = 0.0;            // link-term ratio 4^{4K} e^{-2M/7}
  double remainder = 0.0;        // bound on link terms j > J (+inf if ratio >= 1)
  double raw_total = 0.0;        // partial_sum + remainder, may exceed 1 or be +inf
  double failure_probability = 0.0;  // min(1, raw_total)
  bool informative = false;          // raw_total < 1
  double closed_form = 0.0;          // 8 e^{-M eps1^2 / 14}
  double weight_sum = 0.0;           // sum_{j<=J} (j+1) 2^{-j-2}
};

/// Numeric chaining bound on P(sup_u ||Phi u| - 1| > eps) over unit secants.
/// Throws assumption-violated when the volume assumption fails.
ChainCertificate chaining_failure_bound(int K, double tau, double volume, double epsilon,
                                        std::int64_t M, int J = 60);

/// sum_{j=0}^{J} (j+1) 2^{-j-2}; tends to 1.
double chain_weight_sum(int J);

}  // namespace mcs
