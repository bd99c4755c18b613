#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcslab/sample.hpp"
#include "mcslab/types.hpp"

namespace mcs {

/// sin(pi N z) / sin(pi z) for odd N >= 3 and z in [-1/2, 1/2]; N at z = 0.
double dirichlet_kernel(int N, double z);

/// max |D_N(z)| over a uniform grid of `points` values of |z| in (2/N, 1/2].
double dirichlet_side_lobe(int N, Index points);

/// pi^{K/2} / Gamma(K/2 + 1).
double unit_ball_volume(int K);
/// (4 pi/(K+2))^{K/2} and (2 e pi/(K+2))^{K/2}.
std::pair<double, double> unit_ball_volume_bracket(int K);
/// Whether the bracket contains the volume.  False for K = 1, where the lower
/// end (4 pi / 3)^{1/2} exceeds 2.
bool unit_ball_volume_in_bracket(int K);

// Slack functions: bound minus observed quantity.  Nonnegative means the
// inequality holds.  tau may be +inf.

/// angle[q - p, P_p(q - p)] <= asin(|q - p| / 2 tau), for |q - p| < 2 tau.
double chord_tangent_angle_slack(const Vector& p, const Vector& q, const Matrix& frame_p,
                                 double tau);
/// Discrete curvature at b of the polyline a, b, c against 1/tau plus `allowance` (relative).
double geodesic_curvature_slack(const Vector& a, const Vector& b, const Vector& c, double tau,
                                double allowance = 0.05);
double polyline_curvature(const Vector& a, const Vector& b, const Vector& c);
/// cos angle[T_p, T_q] >= 1 - d_M(p, q) / tau.
double tangent_angle_geodesic_slack(const Matrix& frame_p, const Matrix& frame_q,
                                    double geodesic, double tau);
/// d_M(p, q) <= tau - tau sqrt(1 - 2 |q - p| / tau), for |q - p| <= tau/2.
double geodesic_vs_chord_slack(double chord, double geodesic, double tau);
double geodesic_chord_bound(double chord, double tau);
/// |U(a1, a2) - U(b1, b2)| <= 4 r / |a1 - a2| with r = max(|a1 - b1|, |a2 - b2|).
double secant_perturbation_slack(const Vector& a1, const Vector& a2, const Vector& b1,
                                 const Vector& b2);
/// ||P_a - P_b||_2 <= sqrt(2 l1 / tau) for |a - b| <= l1 < tau/2.
double projector_difference_slack(const Matrix& frame_a, const Matrix& frame_b, double l1,
                                  double tau);
/// |U(x1, x2) - P_p U(x1, x2)| <= sqrt(2 l1 / tau) + l2 / (2 tau) with
/// l1 = |x1 - p|, l2 = |x2 - x1|.
double short_chord_tangent_slack(const Vector& p, const Matrix& frame_p, const Vector& x1,
                                 const Vector& x2, double tau);
/// vol_K(A_M(p, r)) >= (1 - r^2 / 4 tau^2)^{K/2} r^K V_BK, for r <= tau/4.
double local_volume_bound(int K, double r, double tau);

/// Length of the polyline (columns of `points`, wrapping when `closed`) inside
/// the open ball B(center, r).
double polyline_length_in_ball(const Matrix& points, bool closed, const Vector& center, double r);

struct PropertyReport {
  std::string property_id;
  Index pairs_tested = 0;
  double worst_slack = 0.0;
  bool pass = false;
  Index worst_first = -1;
  Index worst_second = -1;
  double tau = 0.0;
  bool tau_estimated = false;

  std::string to_json() const;
};

struct ToolboxOptions {
  Index pair_budget = 1000;
  std::uint64_t seed = 0;
  std::optional<double> tau;
  bool tau_is_estimate = false;  // recorded in reports when `tau` is supplied
  unsigned threads = 1;
};

/// Identifiers accepted by check_toolbox_property.
///   chord_tangent_angle      chord vs its tangent projection
///   geodesic_curvature       curvature of geodesic polylines
///   tangent_angle_geodesic   tangent-plane angle vs geodesic distance
///   geodesic_vs_chord        geodesic vs Euclidean distance
///   projection_injectivity   P_p injective on A_M(p, tau/4)
///   secant_perturbation      stability of chord directions
///   projector_difference     projectors at nearby points
///   short_chord_tangent      short chords vs a nearby tangent plane
///   local_volume             volume of small balls (K = 1)
const std::vector<std::string>& toolbox_property_ids();
/// The eight checks run by a suite (everything but projection_injectivity).
const std::vector<std::string>& default_suite_ids();

inline constexpr double kSlackAllowance = 1e-9;

PropertyReport check_toolbox_property(const ManifoldSample& sample, const std::string& property_id,
                                      const ToolboxOptions& options = {});

/// Resolves tau the same way the property checks do: the model's exact reach,
/// else an estimate from the sample.  Second member is true when estimated.
std::pair<double, bool> resolve_reach(const ManifoldSample& sample, const ToolboxOptions& options);

}  // namespace mcs
