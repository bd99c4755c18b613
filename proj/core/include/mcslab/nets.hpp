#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcslab/sample.hpp"
#include "mcslab/types.hpp"

namespace mcs {

struct GreedyNet {
  double resolution = 0.0;
  std::vector<Index> centers;  // sample indices, in selection order
  std::vector<Index> nearest;  // nearest center (position in `centers`) per sample point
  double covering_radius = 0.0;
  /// Packing bound (2 / (theta(delta/4tau) delta))^K V / V_BK, when the model
  /// carries tau and V and delta <= tau/2.
  std::optional<double> cardinality_bound;
};

/// Farthest-point greedy net on the sample.  Starts at point 0; ties go to the
/// lowest index.  Throws numerical-failure if a known cardinality bound is
/// exceeded.
GreedyNet greedy_net(const ManifoldSample& sample, double delta);

/// Packing bound on the size of a delta-net; theta(a) = sqrt(1 - a^2).
double net_cardinality_bound(int K, double tau, double volume, double delta);

/// Centers of an r-net of the K-dimensional unit ball (K x m).  For K = 1 the
/// net is ceil(1/r) points spaced 2r on [-1, 1].
Matrix unit_ball_net(int K, double r);

struct NetLevel {
  int j = 0;
  GreedyNet centers;               // C_j at resolution delta1 / 4^j
  double tangent_resolution = 0.0; // 2^-j delta_T
  Matrix tangent_net;              // K x m, shared by every center
  double long_threshold = 0.0;     // chords longer than this (absolute) are long
  std::optional<double> center_bound;  // 4^{jK} N0(delta1)
  std::optional<double> cover_bound;   // N~_j(delta)

  /// |U(C_j)| + |C'_j|: ordered center pairs plus tangent vectors.
  double element_count() const;
};

struct NetHierarchy {
  static constexpr double c_eta = 0.4;
  static constexpr double c_threshold = 1.6;
  static double c_eta_prime();  // 1.7 - sqrt(2)

  double delta = 0.0;    // target resolution for secant directions
  double delta1 = 0.0;   // c_eta^2 tau delta^2
  double delta_T = 0.0;  // c_eta c_eta' delta
  double tau = 0.0;
  bool tau_estimated = false;
  std::optional<double> volume;
  bool certificate_available = false;
  std::string certificate_note;
  std::vector<NetLevel> levels;
};

struct HierarchyOptions {
  std::optional<double> tau;  // overrides model metadata and estimation
  bool require_certificate = false;
  unsigned threads = 1;
};

/// Cardinality bound N~_j(delta) = 2 4^{2jK} (6.12 sqrt(K)/delta^2)^{2K} (V/tau^K)^2.
double secant_cover_bound(int K, double tau, double volume, double delta, int j);

/// Volume assumption V / tau^K >= (21 / (2 sqrt K))^K.
bool volume_assumption_holds(int K, double tau, double volume);

NetHierarchy build_net_hierarchy(const ManifoldSample& sample, double delta, int J,
                                 const HierarchyOptions& options = {});

/// One CSV per level: header `center,index`, then the sample indices of C_j.
void write_level_csv(std::ostream& out, const NetLevel& level);

struct SecantSample {
  double tau = 0.0;
  double delta1 = 0.0;
  double threshold = 0.0;  // T = 1.6 sqrt(delta1 / tau), in units of tau
  Matrix directions;       // N x m unit chord directions U(x1, x2)
  std::vector<Index> first;
  std::vector<Index> second;
  std::vector<char> is_long;
  Matrix surrogates;  // N x s, tangent surrogates of the short chords
  std::vector<Index> surrogate_of;  // column of `directions` each surrogate came from

  Index size() const { return directions.cols(); }
  Index long_count() const;
  Index short_count() const { return size() - long_count(); }
};

struct SecantOptions {
  /// 0 takes every unordered pair; otherwise that many random ordered pairs.
  Index max_pairs = 0;
  std::uint64_t seed = 0;
};

SecantSample sample_secants(const ManifoldSample& sample, double delta1, double tau,
                            const SecantOptions& options = {});

/// Distances from a unit direction to the elements of T_j = U(C_j) u C'_j.
class CoverChecker {
 public:
  CoverChecker(const ManifoldSample& sample, const NetHierarchy& hierarchy, int j);

  /// Exact nearest-element distance by scanning every element of T_j.
  double exhaustive(const Vector& u) const;
  /// Distance to the element the covering argument picks for the chord x1 -> x2:
  /// the direction between their nearest centers, or the nearest tangent-net
  /// vector at the center of x1.
  double constructive(Index x1, Index x2, const Vector& u) const;

 private:
  double tangent_distance(Index center_slot, const Vector& u) const;

  const ManifoldSample& sample_;
  const NetLevel& level_;
  Matrix center_distances_;
};

}  // namespace mcs
