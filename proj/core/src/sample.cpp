#include "mcslab/sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <utility>

#include "mcslab/csv.hpp"
#include "mcslab/error.hpp"

namespace mcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Adjacency = std::vector<std::vector<std::pair<Index, double>>>;

// Dijkstra over CSR plus optional extra adjacency for temporary nodes.
std::vector<double> dijkstra(const NeighborGraph& g, const Adjacency* extra, Index source,
                             std::vector<Index>* predecessor) {
  const Index n = g.node_count() + (extra ? static_cast<Index>(extra->size()) : 0);
  std::vector<double> dist(static_cast<std::size_t>(n), kInf);
  if (predecessor) predecessor->assign(static_cast<std::size_t>(n), -1);
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  auto relax = [&](Index u, Index v, double w) {
    const double candidate = dist[u] + w;
    if (candidate < dist[v]) {
      dist[v] = candidate;
      if (predecessor) (*predecessor)[v] = u;
      heap.emplace(candidate, v);
    }
  };
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u < g.node_count()) {
      for (Index e = g.offsets[u]; e < g.offsets[u + 1]; ++e) relax(u, g.targets[e], g.weights[e]);
    }
    if (extra) {
      // Temporary nodes keep symmetric edge lists, so scanning them suffices.
      if (u >= g.node_count()) {
        for (const auto& [v, w] : (*extra)[u - g.node_count()]) relax(u, v, w);
      } else {
        for (std::size_t t = 0; t < extra->size(); ++t) {
          for (const auto& [v, w] : (*extra)[t]) {
            if (v == u) relax(u, g.node_count() + static_cast<Index>(t), w);
          }
        }
      }
    }
  }
  return dist;
}

bool is_connected(const NeighborGraph& g) {
  const Index n = g.node_count();
  if (n <= 1) return true;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  Index reached = 1;
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    for (Index e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
      const Index v = g.targets[e];
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

std::vector<Matrix> tangent_frames(const ManifoldModel& model, const Matrix& parameters) {
  const Index n = parameters.cols();
  std::vector<Matrix> frames;
  frames.reserve(static_cast<std::size_t>(n));
  const double step = model.domain().max_extent() / (100.0 * static_cast<double>(n));
  for (Index i = 0; i < n; ++i) {
    const Vector theta = parameters.col(i);
    const Matrix J = model.has_analytic_tangent() ? model.analytic_jacobian(theta)
                                                  : model.finite_difference_jacobian(theta, step);
    frames.push_back(orthonormalize(J));
  }
  return frames;
}

bool parameters_ordered(const ManifoldModel& model, const Matrix& parameters) {
  if (model.intrinsic_dimension() != 1) return false;
  for (Index i = 1; i < parameters.cols(); ++i) {
    if (!(parameters(0, i) > parameters(0, i - 1))) return false;
  }
  return true;
}

}  // namespace

ManifoldSample::ManifoldSample(ManifoldModel model, Matrix parameters, Matrix points,
                               std::vector<Matrix> frames, NeighborGraph graph, bool ordered)
    : model_(std::move(model)),
      parameters_(std::move(parameters)),
      points_(std::move(points)),
      frames_(std::move(frames)),
      graph_(std::move(graph)),
      ordered_(ordered) {
  require(parameters_.cols() == points_.cols() &&
              static_cast<Index>(frames_.size()) == points_.cols() &&
              graph_.node_count() == points_.cols(),
          ErrorCode::invalid_argument, "inconsistent sample sizes");
}

double ManifoldSample::geodesic_distance(Index i, Index j) const {
  require(i >= 0 && i < size() && j >= 0 && j < size(), ErrorCode::invalid_argument,
          "geodesic_distance: index out of range");
  if (i == j) return 0.0;
  // Run from the smaller index so d(i, j) and d(j, i) are bit-identical.
  const auto dist = dijkstra(graph_, nullptr, std::min(i, j), nullptr);
  return dist[std::max(i, j)];
}

std::vector<double> ManifoldSample::geodesic_distances_from(Index source) const {
  require(source >= 0 && source < size(), ErrorCode::invalid_argument,
          "geodesic_distances_from: index out of range");
  return dijkstra(graph_, nullptr, source, nullptr);
}

std::vector<Index> ManifoldSample::geodesic_path(Index i, Index j) const {
  require(i >= 0 && i < size() && j >= 0 && j < size(), ErrorCode::invalid_argument,
          "geodesic_path: index out of range");
  std::vector<Index> pred;
  dijkstra(graph_, nullptr, i, &pred);
  std::vector<Index> path{j};
  while (path.back() != i) {
    const Index p = pred[path.back()];
    require(p >= 0, ErrorCode::graph_disconnected, "no path between sample points");
    path.push_back(p);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double ManifoldSample::geodesic_between(const Vector& a, const Vector& b) const {
  require(a.size() == ambient_dimension() && b.size() == ambient_dimension(),
          ErrorCode::invalid_argument, "geodesic_between: dimension mismatch");
  const double r = graph_.radius;
  Adjacency extra(2);
  const Vector* ends[2] = {&a, &b};
  for (int t = 0; t < 2; ++t) {
    const Vector& x = *ends[t];
    for (Index i = 0; i < size(); ++i) {
      const double d = (points_.col(i) - x).norm();
      if (d <= r) extra[t].emplace_back(i, d);
    }
    require(!extra[t].empty(), ErrorCode::graph_disconnected,
            "geodesic_between: point has no sample neighbor within the graph radius");
  }
  const double direct = (a - b).norm();
  const Index n = size();
  if (direct <= r) {
    extra[0].emplace_back(n + 1, direct);
    extra[1].emplace_back(n, direct);
  }
  const auto dist = dijkstra(graph_, &extra, n, nullptr);
  require(std::isfinite(dist[n + 1]), ErrorCode::graph_disconnected,
          "geodesic_between: endpoints are not connected");
  return dist[n + 1];
}

void ManifoldSample::write_csv(std::ostream& out) const {
  std::vector<std::string> fields;
  for (int k = 0; k < intrinsic_dimension(); ++k) fields.push_back("param_" + std::to_string(k));
  for (Index d = 0; d < ambient_dimension(); ++d) fields.push_back("x_" + std::to_string(d));
  csv::write_row(out, fields);
  for (Index i = 0; i < size(); ++i) {
    fields.clear();
    for (int k = 0; k < intrinsic_dimension(); ++k)
      fields.push_back(csv::format_double(parameters_(k, i)));
    for (Index d = 0; d < ambient_dimension(); ++d)
      fields.push_back(csv::format_double(points_(d, i)));
    csv::write_row(out, fields);
  }
}

Matrix uniform_parameters(const ParameterDomain& domain, Index count) {
  require(count >= 2, ErrorCode::invalid_argument, "sample count must be >= 2");
  const int K = domain.dimension();
  const bool periodic = domain.topology() == Topology::circle;
  Index per_axis = count;
  if (K > 1) {
    per_axis = static_cast<Index>(std::ceil(std::pow(static_cast<double>(count), 1.0 / K) - 1e-9));
    per_axis = std::max<Index>(per_axis, 2);
  }
  auto node = [&](int k, Index i) {
    if (periodic) return domain.lower(k) + domain.extent(k) * static_cast<double>(i) / per_axis;
    return domain.lower(k) + domain.extent(k) * static_cast<double>(i) / (per_axis - 1);
  };
  Index total = 1;
  for (int k = 0; k < K; ++k) total *= per_axis;
  Matrix params(K, total);
  for (Index c = 0; c < total; ++c) {
    Index rest = c;
    for (int k = K - 1; k >= 0; --k) {
      params(k, c) = node(k, rest % per_axis);
      rest /= per_axis;
    }
  }
  return params;
}

NeighborGraph build_radius_graph(const Matrix& points, double radius) {
  require(radius > 0.0, ErrorCode::invalid_argument, "graph radius must be positive");
  const Index n = points.cols();
  const Vector sq = points.colwise().squaredNorm().transpose();
  const double r2 = radius * radius;
  std::vector<std::vector<std::pair<Index, double>>> adj(static_cast<std::size_t>(n));
  // Gram-matrix distances prune candidates in blocks; kept edges use exact norms.
  constexpr Index kBlock = 256;
  for (Index b0 = 0; b0 < n; b0 += kBlock) {
    const Index bn = std::min(kBlock, n - b0);
    const Matrix gram = points.middleCols(b0, bn).transpose() * points;
    for (Index a = 0; a < bn; ++a) {
      const Index i = b0 + a;
      for (Index j = i + 1; j < n; ++j) {
        const double approx = sq[i] + sq[j] - 2.0 * gram(a, j);
        if (approx > r2 * (1.0 + 1e-9) + 1e-12 * (sq[i] + sq[j])) continue;
        const double d = (points.col(i) - points.col(j)).norm();
        if (d <= radius) {
          adj[i].emplace_back(j, d);
          adj[j].emplace_back(i, d);
        }
      }
    }
  }
  NeighborGraph g;
  g.radius = radius;
  g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    g.offsets[i + 1] = g.offsets[i] + static_cast<Index>(row.size());
    for (const auto& [j, d] : row) {
      g.targets.push_back(j);
      g.weights.push_back(d);
    }
  }
  return g;
}

double connecting_radius(const Matrix& points) {
  const Index n = points.cols();
  if (n <= 1) return 0.0;
  // Prim's algorithm on the complete graph; the bottleneck is the longest tree edge.
  std::vector<double> best(static_cast<std::size_t>(n), kInf);
  std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
  Index current = 0;
  in_tree[0] = 1;
  double bottleneck = 0.0;
  for (Index added = 1; added < n; ++added) {
    Index next = -1;
    double next_d = kInf;
    for (Index j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      best[j] = std::min(best[j], (points.col(current) - points.col(j)).norm());
      if (best[j] < next_d) {
        next_d = best[j];
        next = j;
      }
    }
    in_tree[next] = 1;
    bottleneck = std::max(bottleneck, next_d);
    current = next;
  }
  return bottleneck;
}

ManifoldSample sample_at_parameters(const ManifoldModel& model, const Matrix& parameters,
                                    double graph_radius) {
  require(parameters.rows() == model.intrinsic_dimension(), ErrorCode::invalid_argument,
          "parameter matrix has the wrong number of rows");
  require(parameters.cols() >= 2, ErrorCode::invalid_argument, "sample count must be >= 2");
  require(graph_radius > 0.0, ErrorCode::invalid_argument, "graph radius must be positive");
  const Index n = parameters.cols();
  Matrix points(model.ambient_dimension(), n);
  for (Index i = 0; i < n; ++i) points.col(i) = model.point(Vector(parameters.col(i)));
  NeighborGraph graph = build_radius_graph(points, graph_radius);
  if (!is_connected(graph)) {
    const double needed = connecting_radius(points);
    double r = graph_radius;
    while (r < needed) r *= 2.0;
    std::ostringstream msg;
    msg.precision(17);
    msg << "radius " << graph_radius << " leaves the neighbor graph disconnected; "
        << "smallest connecting radius found by doubling search is " << r;
    fail(ErrorCode::graph_disconnected, msg.str());
  }
  return ManifoldSample(model, parameters, std::move(points), tangent_frames(model, parameters),
                        std::move(graph), parameters_ordered(model, parameters));
}

ManifoldSample sample_manifold(const ManifoldModel& model, Index count, double graph_radius) {
  return sample_at_parameters(model, uniform_parameters(model.domain(), count), graph_radius);
}

}  // namespace mcs
