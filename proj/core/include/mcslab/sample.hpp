#pragma once

#include <iosfwd>
#include <vector>

#include "mcslab/manifold.hpp"
#include "mcslab/types.hpp"

namespace mcs {

/// Radius neighbor graph in compressed sparse row form.
struct NeighborGraph {
  double radius = 0.0;
  std::vector<Index> offsets;  // size n + 1
  std::vector<Index> targets;
  std::vector<double> weights;  // Euclidean edge lengths

  Index node_count() const { return offsets.empty() ? 0 : static_cast<Index>(offsets.size()) - 1; }
  Index edge_count() const { return static_cast<Index>(targets.size()); }
};

/// Dense point cloud on a model with tangent frames and a geodesic graph.
class ManifoldSample {
 public:
  ManifoldSample(ManifoldModel model, Matrix parameters, Matrix points, std::vector<Matrix> frames,
                 NeighborGraph graph, bool ordered);

  const ManifoldModel& model() const { return model_; }
  Index size() const { return points_.cols(); }
  int intrinsic_dimension() const { return model_.intrinsic_dimension(); }
  Index ambient_dimension() const { return points_.rows(); }

  /// Columns are points (N x n) and parameters (K x n).
  const Matrix& points() const { return points_; }
  const Matrix& parameters() const { return parameters_; }
  auto point(Index i) const { return points_.col(i); }
  auto parameter(Index i) const { return parameters_.col(i); }
  /// Orthonormal N x K tangent frame at point i.
  const Matrix& frame(Index i) const { return frames_[static_cast<std::size_t>(i)]; }
  const NeighborGraph& graph() const { return graph_; }

  /// True when points follow the parameter order of a 1-D grid, so consecutive
  /// points form a polyline along the manifold.
  bool ordered() const { return ordered_; }
  /// Ordered and periodic: the last point connects back to the first.
  bool closed() const { return ordered_ && model_.domain().topology() == Topology::circle; }

  double geodesic_distance(Index i, Index j) const;
  std::vector<double> geodesic_distances_from(Index source) const;
  /// Node sequence of a shortest path from i to j (inclusive).
  std::vector<Index> geodesic_path(Index i, Index j) const;
  /// Graph geodesic between two arbitrary points of the manifold, attached to
  /// the graph as temporary nodes with the sample's radius.
  double geodesic_between(const Vector& a, const Vector& b) const;

  /// Header param_0..param_{K-1},x_0..x_{N-1}; one row per point.
  void write_csv(std::ostream& out) const;

 private:
  ManifoldModel model_;
  Matrix parameters_;
  Matrix points_;
  std::vector<Matrix> frames_;
  NeighborGraph graph_;
  bool ordered_;
};

/// Parameters placed uniformly over the domain: a half-open grid on periodic
/// coordinates, endpoints included on intervals.  K > 1 uses a tensor grid
/// with ceil(count^(1/K)) nodes per axis.
Matrix uniform_parameters(const ParameterDomain& domain, Index count);

/// Samples `count` uniformly placed points.  Throws graph-disconnected when
/// the radius graph is disconnected.
ManifoldSample sample_manifold(const ManifoldModel& model, Index count, double graph_radius);

/// Samples at caller-chosen parameters (K x n).  Frames use the same rule as
/// sample_manifold with `count` = n.
ManifoldSample sample_at_parameters(const ManifoldModel& model, const Matrix& parameters,
                                    double graph_radius);

/// Builds the radius graph for a point set; edges join points within `radius`.
NeighborGraph build_radius_graph(const Matrix& points, double radius);

/// Smallest radius connecting the point set (longest edge of a minimum
/// spanning tree).
double connecting_radius(const Matrix& points);

}  // namespace mcs
