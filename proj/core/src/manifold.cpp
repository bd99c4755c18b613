#include "mcslab/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "mcslab/error.hpp"

namespace mcs {

ParameterDomain::ParameterDomain(std::vector<double> lower, std::vector<double> upper,
                                 Topology topology)
    : lower_(std::move(lower)), upper_(std::move(upper)), topology_(topology) {
  require(!lower_.empty() && lower_.size() == upper_.size(), ErrorCode::invalid_argument,
          "parameter domain needs matching, non-empty bounds");
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    require(std::isfinite(lower_[k]) && std::isfinite(upper_[k]) && upper_[k] > lower_[k],
            ErrorCode::invalid_argument, "parameter domain coordinates need finite extent");
  }
}

ParameterDomain ParameterDomain::interval(double lower, double upper) {
  return ParameterDomain({lower}, {upper}, Topology::interval);
}

ParameterDomain ParameterDomain::circle(double period) {
  return ParameterDomain({0.0}, {period}, Topology::circle);
}

ParameterDomain ParameterDomain::box(std::vector<double> lower, std::vector<double> upper,
                                     Topology topology) {
  return ParameterDomain(std::move(lower), std::move(upper), topology);
}

double ParameterDomain::max_extent() const {
  double best = 0.0;
  for (int k = 0; k < dimension(); ++k) best = std::max(best, extent(k));
  return best;
}

double ParameterDomain::distance(const Vector& a, const Vector& b) const {
  require(a.size() == dimension() && b.size() == dimension(), ErrorCode::invalid_argument,
          "parameter dimension mismatch");
  double sum = 0.0;
  for (int k = 0; k < dimension(); ++k) {
    double d = std::abs(a[k] - b[k]);
    if (topology_ == Topology::circle) {
      const double period = extent(k);
      d = std::fmod(d, period);
      d = std::min(d, period - d);
    }
    sum += d * d;
  }
  return std::sqrt(sum);
}

Vector ParameterDomain::canonical(const Vector& theta) const {
  require(theta.size() == dimension(), ErrorCode::invalid_argument, "parameter dimension mismatch");
  if (topology_ != Topology::circle) return theta;
  Vector out = theta;
  for (int k = 0; k < dimension(); ++k) {
    const double period = extent(k);
    double t = std::fmod(theta[k] - lower_[k], period);
    if (t < 0.0) t += period;
    if (t >= period) t = 0.0;
    out[k] = lower_[k] + t;
  }
  return out;
}

ManifoldModel::ManifoldModel(std::string name, ParameterDomain domain, Index ambient_dimension,
                             Chart chart, std::optional<Jacobian> jacobian,
                             ManifoldMetadata metadata)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      ambient_dimension_(ambient_dimension),
      chart_(std::move(chart)),
      jacobian_(std::move(jacobian)),
      metadata_(metadata) {
  require(ambient_dimension_ >= 1, ErrorCode::invalid_argument, "ambient dimension must be >= 1");
  require(static_cast<bool>(chart_), ErrorCode::invalid_argument, "chart must be callable");
}

Vector ManifoldModel::point(const Vector& theta) const {
  require(theta.size() == intrinsic_dimension(), ErrorCode::invalid_argument,
          "parameter dimension mismatch");
  return chart_(theta);
}

Vector ManifoldModel::point(double theta) const { return point(Vector::Constant(1, theta)); }

Matrix ManifoldModel::analytic_jacobian(const Vector& theta) const {
  require(jacobian_.has_value(), ErrorCode::invalid_argument,
          "model '" + name_ + "' has no analytic tangent");
  require(theta.size() == intrinsic_dimension(), ErrorCode::invalid_argument,
          "parameter dimension mismatch");
  return (*jacobian_)(theta);
}

Matrix ManifoldModel::finite_difference_jacobian(const Vector& theta, double step) const {
  require(step > 0.0, ErrorCode::invalid_argument, "finite-difference step must be positive");
  const int K = intrinsic_dimension();
  Matrix J(ambient_dimension_, K);
  for (int k = 0; k < K; ++k) {
    Vector plus = theta, minus = theta;
    plus[k] += step;
    minus[k] -= step;
    J.col(k) = (point(plus) - point(minus)) / (2.0 * step);
  }
  return J;
}

Matrix orthonormalize(const Matrix& jacobian) {
  Eigen::HouseholderQR<Matrix> qr(jacobian);
  const Matrix R = qr.matrixQR().topRows(jacobian.cols()).triangularView<Eigen::Upper>();
  const double scale = jacobian.norm();
  for (Index k = 0; k < jacobian.cols(); ++k) {
    require(std::abs(R(k, k)) > 1e-14 * std::max(scale, 1e-300), ErrorCode::numerical_failure,
            "tangent Jacobian is rank deficient");
  }
  Matrix Q = qr.householderQ() * Matrix::Identity(jacobian.rows(), jacobian.cols());
  // Fix the sign so the frame points along the Jacobian columns.
  for (Index k = 0; k < Q.cols(); ++k) {
    if (R(k, k) < 0.0) Q.col(k) = -Q.col(k);
  }
  // One pass of re-orthogonalization tightens orthonormality to rounding level.
  for (Index k = 0; k < Q.cols(); ++k) {
    for (Index l = 0; l < k; ++l) Q.col(k) -= Q.col(l).dot(Q.col(k)) * Q.col(l);
    Q.col(k).normalize();
  }
  return Q;
}

ManifoldModel make_circle(double kappa, Index N) {
  require(kappa > 0.0 && std::isfinite(kappa), ErrorCode::invalid_argument,
          "circle radius must be positive");
  require(N >= 2, ErrorCode::invalid_argument, "circle needs ambient dimension >= 2");
  auto chart = [kappa, N](const Vector& t) {
    Vector x = Vector::Zero(N);
    x[0] = kappa * std::cos(t[0]);
    x[1] = kappa * std::sin(t[0]);
    return x;
  };
  auto jac = [kappa, N](const Vector& t) {
    Matrix J = Matrix::Zero(N, 1);
    J(0, 0) = -kappa * std::sin(t[0]);
    J(1, 0) = kappa * std::cos(t[0]);
    return J;
  };
  ManifoldMetadata meta;
  meta.reach = kappa;
  meta.volume = 2.0 * std::numbers::pi * kappa;
  return ManifoldModel("circle", ParameterDomain::circle(2.0 * std::numbers::pi), N, chart, jac,
                       meta);
}

ManifoldModel make_gaussian_pulse(double sigma, Index N) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::invalid_argument,
          "pulse width must be positive");
  require(N >= 2, ErrorCode::invalid_argument, "pulse needs ambient dimension >= 2");
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  auto chart = [N, inv2s2](const Vector& t) {
    Vector x(N);
    for (Index n = 0; n < N; ++n) {
      const double u = static_cast<double>(n) / static_cast<double>(N) - t[0];
      x[n] = std::exp(-u * u * inv2s2);
    }
    return x;
  };
  auto jac = [N, inv2s2](const Vector& t) {
    Matrix J(N, 1);
    for (Index n = 0; n < N; ++n) {
      const double u = static_cast<double>(n) / static_cast<double>(N) - t[0];
      J(n, 0) = 2.0 * u * inv2s2 * std::exp(-u * u * inv2s2);
    }
    return J;
  };
  return ManifoldModel("gaussian-pulse", ParameterDomain::interval(0.0, 1.0), N, chart, jac, {});
}

ManifoldModel make_complex_exponential(int fc) {
  require(fc >= 1, ErrorCode::invalid_argument, "complex exponential needs f_C >= 1");
  const Index Nc = 2 * fc + 1;
  const double two_pi = 2.0 * std::numbers::pi;
  auto chart = [fc, Nc, two_pi](const Vector& t) {
    Vector x(2 * Nc);
    for (int n = -fc; n <= fc; ++n) {
      const double phase = two_pi * n * t[0];
      const Index i = n + fc;
      x[2 * i] = std::cos(phase);
      x[2 * i + 1] = std::sin(phase);
    }
    return x;
  };
  auto jac = [fc, Nc, two_pi](const Vector& t) {
    Matrix J(2 * Nc, 1);
    for (int n = -fc; n <= fc; ++n) {
      const double phase = two_pi * n * t[0];
      const Index i = n + fc;
      J(2 * i, 0) = -two_pi * n * std::sin(phase);
      J(2 * i + 1, 0) = two_pi * n * std::cos(phase);
    }
    return J;
  };
  double sum_sq = 0.0;
  for (int n = -fc; n <= fc; ++n) sum_sq += static_cast<double>(n) * n;
  ManifoldMetadata meta;
  meta.reach_upper_bound = std::sqrt(static_cast<double>(Nc));
  meta.volume = two_pi * std::sqrt(sum_sq);
  return ManifoldModel("complex-exponential", ParameterDomain::circle(1.0), 2 * Nc, chart, jac,
                       meta);
}

ManifoldModel make_line_segment(Index N) {
  require(N >= 1, ErrorCode::invalid_argument, "line segment needs ambient dimension >= 1");
  auto chart = [N](const Vector& t) {
    Vector x = Vector::Zero(N);
    x[0] = t[0];
    return x;
  };
  auto jac = [N](const Vector&) {
    Matrix J = Matrix::Zero(N, 1);
    J(0, 0) = 1.0;
    return J;
  };
  ManifoldMetadata meta;
  meta.reach = kInfiniteReach;
  meta.volume = 1.0;
  return ManifoldModel("line-segment", ParameterDomain::interval(0.0, 1.0), N, chart, jac, meta);
}

}  // namespace mcs
