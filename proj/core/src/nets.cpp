#include "mcslab/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mcslab/csv.hpp"
#include "mcslab/error.hpp"
#include "mcslab/philox.hpp"
#include "mcslab/reach.hpp"
#include "mcslab/toolbox.hpp"

namespace mcs {

double net_cardinality_bound(int K, double tau, double volume, double delta) {
  require(K >= 1 && delta > 0.0 && volume > 0.0 && tau > 0.0, ErrorCode::invalid_argument,
          "net_cardinality_bound: invalid arguments");
  const double a = std::isinf(tau) ? 0.0 : delta / (4.0 * tau);
  const double theta = std::sqrt(1.0 - a * a);
  return std::pow(2.0 / (theta * delta), K) * volume / unit_ball_volume(K);
}

GreedyNet greedy_net(const ManifoldSample& sample, double delta) {
  require(delta > 0.0, ErrorCode::invalid_argument, "net resolution must be positive");
  const Matrix& X = sample.points();
  const Index n = sample.size();
  GreedyNet net;
  net.resolution = delta;
  net.nearest.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  Index next = 0;
  for (;;) {
    const Index slot = static_cast<Index>(net.centers.size());
    net.centers.push_back(next);
    double far = -1.0;
    Index far_index = 0;
    for (Index i = 0; i < n; ++i) {
      const double d = (X.col(i) - X.col(next)).norm();
      if (d < dist[i]) {
        dist[i] = d;
        net.nearest[i] = slot;
      }
      if (dist[i] > far) {
        far = dist[i];
        far_index = i;
      }
    }
    if (far <= delta) {
      net.covering_radius = far;
      break;
    }
    next = far_index;
  }
  const auto& meta = sample.model().metadata();
  if (meta.reach && meta.volume && delta <= *meta.reach / 2.0) {
    net.cardinality_bound =
        net_cardinality_bound(sample.intrinsic_dimension(), *meta.reach, *meta.volume, delta);
    require(static_cast<double>(net.centers.size()) <= *net.cardinality_bound,
            ErrorCode::numerical_failure, "greedy net exceeds its cardinality bound");
  }
  return net;
}

Matrix unit_ball_net(int K, double r) {
  require(K >= 1 && r > 0.0, ErrorCode::invalid_argument, "unit_ball_net: invalid arguments");
  if (K == 1) {
    const Index m = static_cast<Index>(std::ceil(1.0 / r - 1e-12));
    Matrix net(1, m);
    for (Index i = 0; i < m; ++i) net(0, i) = std::min(1.0, -1.0 + r + 2.0 * r * i);
    return net;
  }
  // Cubic cells of half-diagonal r; keep the cells that meet the ball.
  const Index per_axis = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(K)) / r));
  const double h = 2.0 / per_axis;
  std::vector<Vector> kept;
  Index total = 1;
  for (int k = 0; k < K; ++k) total *= per_axis;
  for (Index c = 0; c < total; ++c) {
    Vector v(K);
    Index rest = c;
    for (int k = 0; k < K; ++k) {
      v[k] = -1.0 + h * (static_cast<double>(rest % per_axis) + 0.5);
      rest /= per_axis;
    }
    if (v.norm() <= 1.0 + r) kept.push_back(v);
  }
  Matrix net(K, static_cast<Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) net.col(static_cast<Index>(i)) = kept[i];
  return net;
}

double NetHierarchy::c_eta_prime() { return 1.7 - std::sqrt(2.0); }

double NetLevel::element_count() const {
  const double c = static_cast<double>(centers.centers.size());
  return c * (c - 1.0) + c * static_cast<double>(tangent_net.cols());
}

double secant_cover_bound(int K, double tau, double volume, double delta, int j) {
  const double ratio = volume / std::pow(tau, K);
  return 2.0 * std::pow(4.0, 2.0 * j * K) *
         std::pow(6.12 * std::sqrt(static_cast<double>(K)) / (delta * delta), 2.0 * K) * ratio *
         ratio;
}

bool volume_assumption_holds(int K, double tau, double volume) {
  return volume / std::pow(tau, K) >= std::pow(21.0 / (2.0 * std::sqrt(static_cast<double>(K))), K);
}

NetHierarchy build_net_hierarchy(const ManifoldSample& sample, double delta, int J,
                                 const HierarchyOptions& options) {
  require(delta > 0.0 && delta <= 0.5, ErrorCode::invalid_argument,
          "hierarchy resolution must lie in (0, 1/2]");
  require(J >= 0, ErrorCode::invalid_argument, "truncation level must be >= 0");
  const int K = sample.intrinsic_dimension();
  const auto& meta = sample.model().metadata();

  NetHierarchy h;
  if (options.tau) {
    h.tau = *options.tau;
  } else if (meta.reach) {
    h.tau = *meta.reach;
  } else {
    h.tau = estimate_reach(sample, options.threads).tau;
    h.tau_estimated = true;
  }
  require(h.tau > 0.0 && std::isfinite(h.tau), ErrorCode::invalid_argument,
          "net hierarchy needs a finite positive reach");
  h.volume = meta.volume;
  h.delta = delta;
  h.delta1 = NetHierarchy::c_eta * NetHierarchy::c_eta * h.tau * delta * delta;
  h.delta_T = NetHierarchy::c_eta * NetHierarchy::c_eta_prime() * delta;

  if (!h.volume) {
    h.certificate_note = "volume unknown";
  } else if (!volume_assumption_holds(K, h.tau, *h.volume)) {
    h.certificate_note = "volume assumption V/tau^K >= (21/(2 sqrt K))^K fails";
  } else {
    h.certificate_available = true;
  }
  if (options.require_certificate && !h.certificate_available) {
    fail(ErrorCode::assumption_violated, "cardinality certificate unavailable: " + h.certificate_note);
  }

  const double threshold = NetHierarchy::c_threshold * std::sqrt(h.delta1 / h.tau) * h.tau;
  for (int j = 0; j <= J; ++j) {
    NetLevel level;
    level.j = j;
    level.centers = greedy_net(sample, h.delta1 / std::pow(4.0, j));
    level.tangent_resolution = h.delta_T / std::pow(2.0, j);
    level.tangent_net = unit_ball_net(K, level.tangent_resolution);
    level.long_threshold = threshold / std::pow(2.0, j);
    if (h.volume && h.delta1 <= h.tau / 2.0) {
      level.center_bound =
          std::pow(4.0, j * K) * net_cardinality_bound(K, h.tau, *h.volume, h.delta1);
    }
    if (h.certificate_available) {
      level.cover_bound = secant_cover_bound(K, h.tau, *h.volume, delta, j);
    }
    h.levels.push_back(std::move(level));
  }
  return h;
}

void write_level_csv(std::ostream& out, const NetLevel& level) {
  csv::write_row(out, {"center", "index"});
  for (std::size_t c = 0; c < level.centers.centers.size(); ++c) {
    csv::write_row(out, {std::to_string(c), std::to_string(level.centers.centers[c])});
  }
}

Index SecantSample::long_count() const {
  return static_cast<Index>(std::count(is_long.begin(), is_long.end(), 1));
}

SecantSample sample_secants(const ManifoldSample& sample, double delta1, double tau,
                            const SecantOptions& options) {
  require(tau > 0.0, ErrorCode::invalid_argument, "sample_secants needs tau > 0");
  require(delta1 > 0.0, ErrorCode::invalid_argument, "sample_secants needs delta1 > 0");
  const Index n = sample.size();
  const Matrix& X = sample.points();
  SecantSample s;
  s.tau = tau;
  s.delta1 = delta1;
  s.threshold = NetHierarchy::c_threshold * std::sqrt(delta1 / tau);
  const double cut = s.threshold * tau;

  std::vector<std::pair<Index, Index>> pairs;
  if (options.max_pairs == 0) {
    pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    CounterRng rng(options.seed, 0x5ECA);
    pairs.reserve(static_cast<std::size_t>(options.max_pairs));
    while (static_cast<Index>(pairs.size()) < options.max_pairs) {
      const Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
      pairs.emplace_back(i, j >= i ? j + 1 : j);
    }
  }

  std::vector<Vector> dirs, surr;
  for (const auto& [i, j] : pairs) {
    const Vector v = X.col(j) - X.col(i);
    const double chord = v.norm();
    if (!(chord > 1e-12 * std::max(1.0, X.col(i).norm()))) continue;
    const Index column = static_cast<Index>(dirs.size());
    dirs.push_back(v / chord);
    s.first.push_back(i);
    s.second.push_back(j);
    const bool is_long = chord > cut;
    s.is_long.push_back(is_long ? 1 : 0);
    if (!is_long) {
      const Matrix& F = sample.frame(i);
      const Vector t = F * (F.transpose() * dirs.back());
      const double tn = t.norm();
      if (tn > 0.0) {
        surr.push_back(t / tn);
        s.surrogate_of.push_back(column);
      }
    }
  }
  const Index N = sample.ambient_dimension();
  s.directions.resize(N, static_cast<Index>(dirs.size()));
  for (std::size_t c = 0; c < dirs.size(); ++c) s.directions.col(static_cast<Index>(c)) = dirs[c];
  s.surrogates.resize(N, static_cast<Index>(surr.size()));
  for (std::size_t c = 0; c < surr.size(); ++c) s.surrogates.col(static_cast<Index>(c)) = surr[c];
  return s;
}

namespace {

const NetLevel& level_at(const NetHierarchy& h, int j) {
  require(j >= 0 && j < static_cast<int>(h.levels.size()), ErrorCode::invalid_argument,
          "CoverChecker: level out of range");
  return h.levels[static_cast<std::size_t>(j)];
}

}  // namespace

CoverChecker::CoverChecker(const ManifoldSample& sample, const NetHierarchy& hierarchy, int j)
    : sample_(sample),
      level_(level_at(hierarchy, j)) {
  const auto& c = level_.centers.centers;
  const Index m = static_cast<Index>(c.size());
  center_distances_.resize(m, m);
  for (Index a = 0; a < m; ++a) {
    center_distances_(a, a) = 0.0;
    for (Index b = a + 1; b < m; ++b) {
      const double d = (sample_.point(c[a]) - sample_.point(c[b])).norm();
      center_distances_(a, b) = center_distances_(b, a) = d;
    }
  }
}

double CoverChecker::tangent_distance(Index slot, const Vector& u) const {
  const Matrix& F = sample_.frame(level_.centers.centers[static_cast<std::size_t>(slot)]);
  const Vector w = F.transpose() * u;
  const Matrix& T = level_.tangent_net;
  double best = std::numeric_limits<double>::infinity();
  // ||F t - u||^2 = |t|^2 - 2 t.w + 1 for orthonormal F and unit u.
  for (Index k = 0; k < T.cols(); ++k) {
    const double d2 = T.col(k).squaredNorm() - 2.0 * T.col(k).dot(w) + 1.0;
    best = std::min(best, d2);
  }
  return std::sqrt(std::max(0.0, best));
}

double CoverChecker::exhaustive(const Vector& u) const {
  const auto& c = level_.centers.centers;
  const Index m = static_cast<Index>(c.size());
  Vector proj(m);
  for (Index a = 0; a < m; ++a) proj[a] = sample_.point(c[a]).dot(u);
  double best_dot = -std::numeric_limits<double>::infinity();
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) {
      if (a == b || center_distances_(a, b) == 0.0) continue;
      best_dot = std::max(best_dot, (proj[b] - proj[a]) / center_distances_(a, b));
    }
  }
  double best = std::isinf(best_dot) ? std::numeric_limits<double>::infinity()
                                     : std::sqrt(std::max(0.0, 2.0 - 2.0 * best_dot));
  for (Index a = 0; a < m; ++a) best = std::min(best, tangent_distance(a, u));
  return best;
}

double CoverChecker::constructive(Index x1, Index x2, const Vector& u) const {
  const Index p1 = level_.centers.nearest[static_cast<std::size_t>(x1)];
  const Index p2 = level_.centers.nearest[static_cast<std::size_t>(x2)];
  double best = tangent_distance(p1, u);
  if (p1 != p2 && center_distances_(p1, p2) > 0.0) {
    const auto& c = level_.centers.centers;
    const Vector U = (sample_.point(c[p2]) - sample_.point(c[p1])) / center_distances_(p1, p2);
    best = std::min(best, (U - u).norm());
  }
  return best;
}

}  // namespace mcs
