#include "mcslab/toolbox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>
#include <numbers>

#include "mcslab/error.hpp"
#include "mcslab/parallel.hpp"
#include "mcslab/philox.hpp"
#include "mcslab/reach.hpp"

namespace mcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1/tau with the flat-set convention.
double curvature_of(double tau) { return std::isinf(tau) ? 0.0 : 1.0 / tau; }

double direction_angle(const Vector& v, const Matrix& frame) {
  const Vector along = frame * (frame.transpose() * v);
  return std::atan2((v - along).norm(), along.norm());
}

}  // namespace

double dirichlet_kernel(int N, double z) {
  require(N >= 3 && N % 2 == 1, ErrorCode::invalid_argument,
          "Dirichlet kernel needs an odd N >= 3");
  require(z >= -0.5 && z <= 0.5, ErrorCode::out_of_range, "Dirichlet kernel needs |z| <= 1/2");
  if (z == 0.0) return N;
  return std::sin(std::numbers::pi * N * z) / std::sin(std::numbers::pi * z);
}

double dirichlet_side_lobe(int N, Index points) {
  require(points >= 2, ErrorCode::invalid_argument, "side-lobe scan needs at least 2 points");
  const double lo = 2.0 / N;
  double best = 0.0;
  // Grid over (2/N, 1/2]; the kernel is even, so |z| covers both signs.
  for (Index i = 1; i <= points; ++i) {
    const double z = lo + (0.5 - lo) * static_cast<double>(i) / static_cast<double>(points);
    best = std::max(best, std::abs(dirichlet_kernel(N, z)));
  }
  return best;
}

std::pair<double, double> unit_ball_volume_bracket(int K) {
  const double half = K / 2.0;
  return {std::pow(4.0 * std::numbers::pi / (K + 2), half),
          std::pow(2.0 * std::numbers::e * std::numbers::pi / (K + 2), half)};
}

double unit_ball_volume(int K) {
  require(K >= 1, ErrorCode::invalid_argument, "unit ball dimension must be >= 1");
  return std::pow(std::numbers::pi, K / 2.0) / std::tgamma(K / 2.0 + 1.0);
}

bool unit_ball_volume_in_bracket(int K) {
  const double v = unit_ball_volume(K);
  const auto [lo, hi] = unit_ball_volume_bracket(K);
  return lo <= v * (1.0 + 1e-12) && v <= hi * (1.0 + 1e-12);
}

double chord_tangent_angle_slack(const Vector& p, const Vector& q, const Matrix& frame_p,
                                 double tau) {
  const Vector v = q - p;
  const double bound = std::asin(std::min(1.0, v.norm() / 2.0 * curvature_of(tau)));
  return bound - direction_angle(v, frame_p);
}

double polyline_curvature(const Vector& a, const Vector& b, const Vector& c) {
  const Vector d1 = b - a, d2 = c - b;
  const double s1 = d1.norm(), s2 = d2.norm();
  require(s1 > 0.0 && s2 > 0.0, ErrorCode::invalid_argument, "polyline has repeated vertices");
  return 2.0 * (d2 / s2 - d1 / s1).norm() / (s1 + s2);
}

double geodesic_curvature_slack(const Vector& a, const Vector& b, const Vector& c, double tau,
                                double allowance) {
  return (1.0 + allowance) * curvature_of(tau) - polyline_curvature(a, b, c);
}

double tangent_angle_geodesic_slack(const Matrix& frame_p, const Matrix& frame_q, double geodesic,
                                    double tau) {
  const double cosine = std::cos(principal_angle(frame_p, frame_q).angle);
  return cosine - (1.0 - geodesic * curvature_of(tau));
}

double geodesic_chord_bound(double chord, double tau) {
  if (std::isinf(tau)) return chord;
  // tau (1 - sqrt(1 - x)) written without cancellation.
  const double x = std::min(1.0, 2.0 * chord / tau);
  return tau * x / (1.0 + std::sqrt(1.0 - x));
}

double geodesic_vs_chord_slack(double chord, double geodesic, double tau) {
  return geodesic_chord_bound(chord, tau) - geodesic;
}

double secant_perturbation_slack(const Vector& a1, const Vector& a2, const Vector& b1,
                                 const Vector& b2) {
  const double r = std::max((a1 - b1).norm(), (a2 - b2).norm());
  const double la = (a2 - a1).norm(), lb = (b2 - b1).norm();
  require(la > 0.0 && lb > 0.0, ErrorCode::invalid_argument, "secant endpoints coincide");
  const Vector ua = (a2 - a1) / la, ub = (b2 - b1) / lb;
  return 4.0 * r / la - (ua - ub).norm();
}

double projector_difference_slack(const Matrix& frame_a, const Matrix& frame_b, double l1,
                                  double tau) {
  const double gap = principal_angle(frame_a, frame_b).projector_gap;
  return std::sqrt(2.0 * l1 * curvature_of(tau)) - gap;
}

double short_chord_tangent_slack(const Vector& p, const Matrix& frame_p, const Vector& x1,
                                 const Vector& x2, double tau) {
  const Vector v = x2 - x1;
  const double l2 = v.norm();
  require(l2 > 0.0, ErrorCode::invalid_argument, "chord endpoints coincide");
  const Vector u = v / l2;
  const double lhs = (u - frame_p * (frame_p.transpose() * u)).norm();
  const double l1 = (x1 - p).norm();
  return std::sqrt(2.0 * l1 * curvature_of(tau)) + l2 / 2.0 * curvature_of(tau) - lhs;
}

double local_volume_bound(int K, double r, double tau) {
  const double a = r / 2.0 * curvature_of(tau);
  return std::pow(1.0 - a * a, K / 2.0) * std::pow(r, K) * unit_ball_volume(K);
}

double polyline_length_in_ball(const Matrix& points, bool closed, const Vector& center, double r) {
  const Index n = points.cols();
  const Index segments = closed ? n : n - 1;
  double total = 0.0;
  for (Index s = 0; s < segments; ++s) {
    const Vector a = points.col(s);
    const Vector d = points.col((s + 1) % n) - a;
    const double len2 = d.squaredNorm();
    if (len2 == 0.0) continue;
    const Vector w = a - center;
    const double b = d.dot(w) / len2;
    const double c = (w.squaredNorm() - r * r) / len2;
    const double disc = b * b - c;
    if (disc <= 0.0) continue;
    const double root = std::sqrt(disc);
    const double lo = std::max(0.0, -b - root), hi = std::min(1.0, -b + root);
    if (hi > lo) total += (hi - lo) * std::sqrt(len2);
  }
  return total;
}

std::string PropertyReport::to_json() const {
  nlohmann::json j;
  j["property_id"] = property_id;
  j["pairs_tested"] = pairs_tested;
  j["worst_slack"] = worst_slack;
  j["pass"] = pass;
  return j.dump();
}

const std::vector<std::string>& toolbox_property_ids() {
  static const std::vector<std::string> ids{
      "chord_tangent_angle",    "geodesic_curvature",   "tangent_angle_geodesic",
      "geodesic_vs_chord",      "projection_injectivity", "secant_perturbation",
      "projector_difference",   "short_chord_tangent",  "local_volume"};
  return ids;
}

const std::vector<std::string>& default_suite_ids() {
  static const std::vector<std::string> ids{
      "chord_tangent_angle", "geodesic_curvature",   "tangent_angle_geodesic",
      "geodesic_vs_chord",   "secant_perturbation",  "projector_difference",
      "short_chord_tangent", "local_volume"};
  return ids;
}

std::pair<double, bool> resolve_reach(const ManifoldSample& sample, const ToolboxOptions& options) {
  if (options.tau) return {*options.tau, options.tau_is_estimate};
  if (const auto& r = sample.model().metadata().reach) return {*r, false};
  return {estimate_reach(sample, options.threads).tau, true};
}

namespace {

struct Draw {
  Index a = -1, b = -1, c = -1, d = -1;
};

class PairSampler {
 public:
  PairSampler(const ManifoldSample& sample, std::uint64_t seed, std::uint32_t stream)
      : sample_(sample), rng_(seed, stream) {}

  Index any() { return static_cast<Index>(rng_.below(static_cast<std::uint64_t>(sample_.size()))); }

  /// Uniform among points j != i whose distance to i satisfies `keep`; -1 if none.
  template <typename Keep>
  Index partner(Index i, Keep&& keep) {
    candidates_.clear();
    for (Index j = 0; j < sample_.size(); ++j) {
      if (j == i) continue;
      if (keep(j, (sample_.point(j) - sample_.point(i)).norm())) candidates_.push_back(j);
    }
    if (candidates_.empty()) return -1;
    return candidates_[rng_.below(candidates_.size())];
  }

  Index graph_neighbor(Index i) {
    const auto& g = sample_.graph();
    const Index deg = g.offsets[i + 1] - g.offsets[i];
    if (deg == 0) return -1;
    return g.targets[g.offsets[i] + static_cast<Index>(rng_.below(static_cast<std::uint64_t>(deg)))];
  }

 private:
  const ManifoldSample& sample_;
  CounterRng rng_;
  std::vector<Index> candidates_;
};

std::uint32_t stream_for(const std::string& id) {
  const auto& ids = toolbox_property_ids();
  return static_cast<std::uint32_t>(std::find(ids.begin(), ids.end(), id) - ids.begin()) + 0x7B00u;
}

// Vertex sequence from i to j along the sample order, forward with wrap-around.
std::vector<Index> ordered_run(const ManifoldSample& sample, Index i, Index j) {
  std::vector<Index> run;
  const Index n = sample.size();
  if (sample.closed()) {
    const Index forward = (j - i + n) % n;
    const Index backward = n - forward;
    const Index step = forward <= backward ? 1 : n - 1;
    for (Index k = i;; k = (k + step) % n) {
      run.push_back(k);
      if (k == j) break;
    }
  } else {
    const Index step = j >= i ? 1 : -1;
    for (Index k = i;; k += step) {
      run.push_back(k);
      if (k == j) break;
    }
  }
  return run;
}

}  // namespace

PropertyReport check_toolbox_property(const ManifoldSample& sample, const std::string& id,
                                      const ToolboxOptions& options) {
  const auto& ids = toolbox_property_ids();
  require(std::find(ids.begin(), ids.end(), id) != ids.end(), ErrorCode::invalid_argument,
          "unknown property id '" + id + "'");
  require(options.pair_budget >= 1, ErrorCode::invalid_argument, "pair budget must be >= 1");
  const int K = sample.intrinsic_dimension();
  if (id == "local_volume") {
    require(K == 1 && sample.ordered(), ErrorCode::invalid_argument,
            "local_volume is checked on ordered samples of curves only");
  }

  const auto [tau, estimated] = resolve_reach(sample, options);
  const Index n = sample.size();
  auto X = [&](Index i) { return Vector(sample.point(i)); };

  PairSampler sampler(sample, options.seed, stream_for(id));
  std::vector<Draw> draws;
  for (Index attempt = 0; attempt < options.pair_budget; ++attempt) {
    Draw d;
    d.a = sampler.any();
    if (id == "chord_tangent_angle") {
      d.b = sampler.partner(d.a, [&](Index, double c) { return c > 0.0 && c < 2.0 * tau; });
    } else if (id == "geodesic_curvature") {
      d.b = sampler.partner(d.a, [](Index, double) { return true; });
    } else if (id == "tangent_angle_geodesic") {
      d.b = sampler.partner(d.a, [](Index, double c) { return c > 0.0; });
    } else if (id == "geodesic_vs_chord") {
      d.b = sampler.partner(d.a, [&](Index, double c) { return c > 0.0 && c <= tau / 2.0; });
    } else if (id == "projection_injectivity") {
      d.b = d.a;
    } else if (id == "secant_perturbation") {
      d.b = sampler.partner(d.a, [](Index, double c) { return c > 0.0; });
      if (d.b >= 0) {
        d.c = sampler.graph_neighbor(d.a);
        d.d = sampler.graph_neighbor(d.b);
        if (d.c < 0 || d.d < 0 || (X(d.c) - X(d.d)).norm() == 0.0) d.b = -1;
      }
    } else if (id == "projector_difference") {
      d.b = sampler.partner(d.a, [&](Index, double c) { return c < tau / 2.0; });
    } else if (id == "short_chord_tangent") {
      d.b = sampler.partner(d.a, [&](Index, double c) { return c > 0.0 && c < tau / 2.0; });
      if (d.b >= 0) {
        // The base point may coincide with x1.
        const Index p = sampler.partner(d.a, [&](Index, double c) { return c < tau / 2.0; });
        d.c = p < 0 ? d.a : p;
      }
    } else if (id == "local_volume") {
      const Vector first = X(0), last = X(n - 1);
      const Vector p = X(d.a);
      d.b = sampler.partner(d.a, [&](Index, double r) {
        if (!(r > 0.0 && r <= tau / 4.0)) return false;
        if (sample.closed()) return true;
        return (first - p).norm() >= r && (last - p).norm() >= r;
      });
    }
    if (d.b >= 0) draws.push_back(d);
  }
  if (draws.empty()) {
    fail(ErrorCode::no_applicable_pairs, "no sampled pair satisfies the preconditions of " + id);
  }

  std::vector<double> slack(draws.size(), kInf);
  parallel_for(draws.size(), options.threads, [&](std::size_t t) {
    const Draw& d = draws[t];
    double s = kInf;
    if (id == "chord_tangent_angle") {
      s = chord_tangent_angle_slack(X(d.a), X(d.b), sample.frame(d.a), tau);
    } else if (id == "geodesic_curvature") {
      const std::vector<Index> path =
          sample.ordered() ? ordered_run(sample, d.a, d.b) : sample.geodesic_path(d.a, d.b);
      for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        s = std::min(s, geodesic_curvature_slack(X(path[k - 1]), X(path[k]), X(path[k + 1]), tau));
      }
    } else if (id == "tangent_angle_geodesic") {
      s = tangent_angle_geodesic_slack(sample.frame(d.a), sample.frame(d.b),
                                       sample.geodesic_distance(d.a, d.b), tau);
    } else if (id == "geodesic_vs_chord") {
      s = geodesic_vs_chord_slack((X(d.b) - X(d.a)).norm(), sample.geodesic_distance(d.a, d.b),
                                  tau);
    } else if (id == "projection_injectivity") {
      const Matrix& F = sample.frame(d.a);
      std::vector<Vector> projected;
      for (Index j = 0; j < n; ++j) {
        const Vector v = X(j) - X(d.a);
        if (v.norm() < tau / 4.0) projected.push_back(F.transpose() * v);
      }
      double gap = kInf;
      for (std::size_t u = 0; u < projected.size(); ++u)
        for (std::size_t w = u + 1; w < projected.size(); ++w)
          gap = std::min(gap, (projected[u] - projected[w]).norm());
      s = gap - 1e-10;
    } else if (id == "secant_perturbation") {
      s = secant_perturbation_slack(X(d.a), X(d.b), X(d.c), X(d.d));
    } else if (id == "projector_difference") {
      s = projector_difference_slack(sample.frame(d.a), sample.frame(d.b),
                                     (X(d.a) - X(d.b)).norm(), tau);
    } else if (id == "short_chord_tangent") {
      s = short_chord_tangent_slack(X(d.c), sample.frame(d.c), X(d.a), X(d.b), tau);
    } else if (id == "local_volume") {
      const double r = (X(d.b) - X(d.a)).norm();
      s = polyline_length_in_ball(sample.points(), sample.closed(), X(d.a), r) -
          local_volume_bound(1, r, tau);
    }
    slack[t] = std::isnan(s) ? -kInf : s;
  });

  PropertyReport report;
  report.property_id = id;
  report.tau = tau;
  report.tau_estimated = estimated;
  report.worst_slack = kInf;
  for (std::size_t t = 0; t < draws.size(); ++t) {
    if (slack[t] == kInf) continue;  // the draw produced nothing to compare
    ++report.pairs_tested;
    if (slack[t] < report.worst_slack) {
      report.worst_slack = slack[t];
      report.worst_first = draws[t].a;
      report.worst_second = draws[t].b;
    }
  }
  if (report.pairs_tested == 0) {
    fail(ErrorCode::no_applicable_pairs, "no sampled pair produced a comparison for " + id);
  }
  report.pass = report.worst_slack >= -kSlackAllowance;
  return report;
}

}  // namespace mcs
