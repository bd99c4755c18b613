#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcslab/manifold.hpp"
#include "mcslab/nets.hpp"
#include "mcslab/operator.hpp"
#include "mcslab/sample.hpp"
#include "mcslab/types.hpp"

namespace mcs {

struct SolverOptions {
  Index grid = 1024;
  double tol = 1e-9;  // final bracket width in parameter units
};

struct SolverTrace {
  Index grid_points = 0;
  Vector grid_best;  // best grid parameter
  double grid_value = 0.0;
  int refinement_iterations = 0;
  bool refinement_accepted = false;
};

/// Minimizes f over the parameter domain: uniform grid, then golden-section
/// refinement on the bracket around the best grid node (coordinate-wise for
/// K > 1).  Among equal values the earliest parameter in canonical order wins;
/// refinement replaces the grid node only when strictly better.
Vector minimize_over_domain(const ParameterDomain& domain,
                            const std::function<double(const Vector&)>& objective,
                            const SolverOptions& options, SolverTrace* trace = nullptr);

struct OracleResult {
  Vector x_star;
  Vector theta_star;
  double distance = 0.0;
  SolverTrace trace;
};

struct RecoveryResult {
  Vector x_hat;
  Vector theta_hat;
  double residual = 0.0;  // ||y - Phi x_hat||
  SolverTrace trace;
};

/// argmin over theta of ||x - x_theta||.
OracleResult nearest_point_on_manifold(const ManifoldModel& model, const Vector& x,
                                       const SolverOptions& options = {});
/// argmin over theta of ||y - Phi x_theta||.
RecoveryResult recover_signal(const ManifoldModel& model, const MeasurementOperator& op,
                              const Vector& y, const SolverOptions& options = {});
/// Parameter of recover_signal's solution.
Vector estimate_parameter(const ManifoldModel& model, const MeasurementOperator& op,
                          const Vector& y, const SolverOptions& options = {});

struct BoundCheckRecord {
  std::string bound;  // deterministic | probabilistic | geodesic | adversarial
  double distance_to_manifold = 0.0;  // ||x - x*||
  double recovery_error = 0.0;        // ||x - x_hat||
  double geodesic = 0.0;              // d_M(x_hat, x*), geodesic check only
  double noise = 0.0;                 // ||n||
  double epsilon = 0.0;
  bool empirical_epsilon = false;  // epsilon is a measured eps_hat
  double sigma = 0.0;              // sigma_M or sigma_m, where used
  Index N = 0;
  Index M = 0;
  double tau = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool applicable = true;
  bool pass = false;
  int branch = -1;              // 0/1: which term of the min is active
  double sqrt_argument = 0.0;   // geodesic check: argument of the square root
};

/// ||x - x_hat|| <= (1 + 2e)(2 sigma_M + 1) ||x - x*|| + (2 + 4e) ||n||.
BoundCheckRecord check_deterministic_bound(const Vector& x, const Vector& x_hat,
                                           const Vector& x_star, const Vector& noise,
                                           double epsilon, double sigma_max);

/// ||x - x_hat|| <= min((1 + 3e) d + e tau / 40, (1 + 2e)(2 sqrt(N/M) + 5) d) + (2 + 4e) ||n||.
BoundCheckRecord check_probabilistic_bound(const Vector& x, const Vector& x_hat,
                                           const Vector& x_star, const Vector& noise,
                                           double epsilon, Index N, Index M, double tau);

/// d_M(x_hat, x*) <= min((4 + 6e) d + e tau / 20, ((4 + 8e) sqrt(N/M) + 12 + 20e) d)
///                   + (4 + 8e) ||n||, when d + (10/9) ||n|| <= 0.163 tau.
BoundCheckRecord check_geodesic_bound(const ManifoldSample& sample, const Vector& x,
                                      const Vector& x_hat, const Vector& x_star,
                                      const Vector& noise, double epsilon, Index N, Index M,
                                      double tau);

struct AdversarialInstance {
  Vector x;
  Vector u;
  double nu = 0.0;
  double sigma_min = 0.0;
  double measurement_norm = 0.0;  // ||Phi x||
  Vector x_hat;
  Vector x_star;
  double ratio = 0.0;  // ||x - x_hat|| / ||x - x*||
  double ratio_bound = 0.0;  // sigma_m / (2 (1 + eps))
  bool segment_embedded = false;  // | ||Phi e_1|| - 1 | <= eps
  BoundCheckRecord record;
};

/// Worst-case point for recovery on the segment [0, e_1]: x = e_1 + nu u with
/// Phi x = 0.  The record's slack is ||x - x_hat|| - sigma_m ||x - x*|| / (2 (1 + eps)).
/// Throws precondition-violated when sigma_m(Phi) < 8/3.
AdversarialInstance construct_adversarial_instance(const MeasurementOperator& op, double epsilon,
                                                   const SolverOptions& options = {});

struct RecoveryTrialConfig {
  Index M = 64;
  double distance = 0.05;  // ||x - x*||
  double noise = 0.01;     // ||n||
  std::optional<double> tau;  // defaults to the model's exact reach
  SolverOptions solver;
};

struct RecoveryTrial {
  std::uint64_t seed = 0;
  Index M = 0;
  Index N = 0;
  double distance = 0.0;
  double noise = 0.0;
  double error = 0.0;     // ||x - x_hat||
  double geodesic = 0.0;  // d_M(x_hat, x*)
  double eps_hat = 0.0;
  double sigma_max = 0.0;
  double parameter_error = 0.0;  // d_Theta(theta_hat, theta*)
  BoundCheckRecord deterministic;
  BoundCheckRecord probabilistic;
  BoundCheckRecord geodesic_check;
};

/// One seeded recovery trial on a K = 1 model: Phi from the operator stream
/// (seed, 0); theta_0, the normal offset of x and the noise n from an
/// independent stream.  eps_hat is measured on `secants`; bound checks run in
/// empirical mode.
RecoveryTrial run_recovery_trial(const ManifoldSample& sample, const SecantSample& secants,
                                 const RecoveryTrialConfig& config, std::uint64_t seed);

/// Header seed,M,N,distance,noise,error,geodesic,eps_hat,deterministic,probabilistic,
/// geodesic_applicable,geodesic_pass; pass flags as 0/1.
void write_trial_csv(std::ostream& out, const std::vector<RecoveryTrial>& trials);

}  // namespace mcs
