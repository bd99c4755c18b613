#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcslab/types.hpp"

namespace mcs {

enum class Topology { interval, circle };

/// Parameter space of a chart: a box of finite extent, either with ordinary
/// (interval) coordinates or with every coordinate periodic (circle/torus).
class ParameterDomain {
 public:
  static ParameterDomain interval(double lower, double upper);
  static ParameterDomain circle(double period);
  static ParameterDomain box(std::vector<double> lower, std::vector<double> upper,
                             Topology topology = Topology::interval);

  int dimension() const { return static_cast<int>(lower_.size()); }
  Topology topology() const { return topology_; }
  double lower(int k) const { return lower_[k]; }
  double upper(int k) const { return upper_[k]; }
  double extent(int k) const { return upper_[k] - lower_[k]; }
  /// Largest coordinate extent; solver tolerances are relative to it.
  double max_extent() const;

  /// Euclidean on boxes, per-coordinate arc metric on periodic coordinates.
  double distance(const Vector& a, const Vector& b) const;
  /// Wraps periodic coordinates into [lower, upper).
  Vector canonical(const Vector& theta) const;

 private:
  ParameterDomain(std::vector<double> lower, std::vector<double> upper, Topology topology);

  std::vector<double> lower_;
  std::vector<double> upper_;
  Topology topology_;
};

struct ManifoldMetadata {
  /// Exact reach, when known.  kInfiniteReach marks a flat set.
  std::optional<double> reach;
  /// Proven upper bound on the reach, when only that is known.
  std::optional<double> reach_upper_bound;
  /// K-dimensional volume.
  std::optional<double> volume;
};

/// A parametric manifold theta -> x_theta in R^N.
///
/// Models are immutable; the chart and tangent callables must be pure.  The
/// tangent callable returns the N x K Jacobian of the chart.
class ManifoldModel {
 public:
  using Chart = std::function<Vector(const Vector&)>;
  using Jacobian = std::function<Matrix(const Vector&)>;

  ManifoldModel(std::string name, ParameterDomain domain, Index ambient_dimension, Chart chart,
                std::optional<Jacobian> jacobian, ManifoldMetadata metadata);

  const std::string& name() const { return name_; }
  const ParameterDomain& domain() const { return domain_; }
  int intrinsic_dimension() const { return domain_.dimension(); }
  Index ambient_dimension() const { return ambient_dimension_; }
  const ManifoldMetadata& metadata() const { return metadata_; }

  Vector point(const Vector& theta) const;
  Vector point(double theta) const;

  bool has_analytic_tangent() const { return jacobian_.has_value(); }
  /// Analytic Jacobian; throws invalid-argument when the model has none.
  Matrix analytic_jacobian(const Vector& theta) const;
  /// Central differences with the given step on every coordinate.
  Matrix finite_difference_jacobian(const Vector& theta, double step) const;

 private:
  std::string name_;
  ParameterDomain domain_;
  Index ambient_dimension_;
  Chart chart_;
  std::optional<Jacobian> jacobian_;
  ManifoldMetadata metadata_;
};

/// Circle of radius kappa in the first two coordinates of R^N.
ManifoldModel make_circle(double kappa, Index ambient_dimension);

/// Shifts of a Gaussian pulse sampled on n/N, theta in [0, 1].
ManifoldModel make_gaussian_pulse(double sigma, Index ambient_dimension);

/// Complex exponential curve t -> [exp(i 2 pi n t)]_{n=-fc..fc} in C^(2fc+1),
/// stored as interleaved (re, im) pairs in R^(2(2fc+1)).
ManifoldModel make_complex_exponential(int max_frequency);

/// Segment joining the origin and e_1 in R^N.
ManifoldModel make_line_segment(Index ambient_dimension);

/// Orthonormal basis (N x K) for the column span of a full-rank Jacobian.
Matrix orthonormalize(const Matrix& jacobian);

}  // namespace mcs
