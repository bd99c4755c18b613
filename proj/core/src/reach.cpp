#include "mcslab/reach.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mcslab/error.hpp"
#include "mcslab/parallel.hpp"

namespace mcs {

ReachEstimate estimate_reach(const ManifoldSample& sample, unsigned threads) {
  const Index n = sample.size();
  require(n >= 10, ErrorCode::insufficient_sample, "reach estimation needs at least 10 points");
  const Matrix& X = sample.points();

  struct Local {
    double tau = kInfiniteReach;
    Index q = -1;
    Index count = 0;
  };
  std::vector<Local> per_point(static_cast<std::size_t>(n));

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ip) {
    const Index p = static_cast<Index>(ip);
    const Matrix& F = sample.frame(p);
    const Matrix D = X.colwise() - X.col(p);
    const Matrix R = D - F * (F.transpose() * D);
    Local local;
    for (Index q = 0; q < n; ++q) {
      if (q == p) continue;
      const double chord = D.col(q).norm();
      if (!(chord > 1e-12 * std::max(1.0, X.col(p).norm()))) continue;
      const double normal = R.col(q).norm();
      if (normal < 1e-12 * chord) continue;
      const double quotient = chord * chord / (2.0 * normal);
      ++local.count;
      if (quotient < local.tau) {
        local.tau = quotient;
        local.q = q;
      }
    }
    per_point[ip] = local;
  });

  ReachEstimate out;
  for (Index p = 0; p < n; ++p) {
    const Local& l = per_point[p];
    out.quotients += l.count;
    if (l.tau < out.tau) {
      out.tau = l.tau;
      out.p = p;
      out.q = l.q;
    }
  }
  return out;
}

TangentProjector::TangentProjector(Index base, Matrix frame) : base_(base), frame_(std::move(frame)) {
  const Matrix gram = frame_.transpose() * frame_;
  require((gram - Matrix::Identity(gram.rows(), gram.cols())).norm() <= 1e-10,
          ErrorCode::invalid_argument, "tangent frame is not orthonormal");
}

double symmetric_operator_norm(const Matrix& a, double tolerance) {
  const Index n = a.rows();
  if (n == 0) return 0.0;
  // Start from the row of largest norm: never orthogonal to the top eigenvector
  // for the rank-2 projector differences used here, and deterministic.
  Index start = 0;
  a.rowwise().norm().maxCoeff(&start);
  Vector v = a.row(start).transpose();
  if (v.norm() == 0.0) return 0.0;
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 10000; ++it) {
    // Square the operator so the symmetric +/- eigenvalue pair does not oscillate.
    Vector w = a * (a * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = std::sqrt(norm);
    w /= norm;
    const bool done = std::abs(next - estimate) <= tolerance * next;
    estimate = next;
    v = std::move(w);
    if (done) break;
  }
  return estimate;
}

PrincipalAngle principal_angle(const Matrix& fp, const Matrix& fq) {
  require(fp.rows() == fq.rows() && fp.cols() == fq.cols() && fp.cols() >= 1,
          ErrorCode::invalid_argument, "principal_angle: frame dimensions differ");
  Eigen::JacobiSVD<Matrix> svd(fp.transpose() * fq);
  const double smallest = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
  const Matrix residual = fq - fp * (fp.transpose() * fq);
  const double largest_sine =
      std::min(1.0, Eigen::JacobiSVD<Matrix>(residual).singularValues()[0]);
  PrincipalAngle out;
  // asin is well conditioned for small angles, acos for large ones.
  out.angle = largest_sine <= std::sqrt(0.5) ? std::asin(largest_sine) : std::acos(smallest);
  out.projector_gap = symmetric_operator_norm(fp * fp.transpose() - fq * fq.transpose());
  require(std::abs(std::sin(out.angle) - out.projector_gap) <= 1e-8, ErrorCode::numerical_failure,
          "principal angle and projector gap disagree");
  return out;
}

}  // namespace mcs
