#pragma once

#include "mcslab/sample.hpp"
#include "mcslab/types.hpp"

namespace mcs {

struct ReachEstimate {
  double tau = kInfiniteReach;  // +inf when every pair is flat
  Index p = -1;                 // minimizing base point
  Index q = -1;
  Index quotients = 0;  // pairs that contributed a finite quotient

  bool flat() const { return !(tau < kInfiniteReach); }
};

/// Federer quotient min ||q-p||^2 / (2 dist(q-p, T_p)) over ordered pairs.
ReachEstimate estimate_reach(const ManifoldSample& sample, unsigned threads = 1);

/// Orthogonal projector onto span(frame) for an orthonormal N x K frame.
class TangentProjector {
 public:
  TangentProjector(Index base, Matrix frame);

  Index base() const { return base_; }
  const Matrix& frame() const { return frame_; }
  Vector apply(const Vector& v) const { return frame_ * (frame_.transpose() * v); }
  Matrix materialize() const { return frame_ * frame_.transpose(); }

 private:
  Index base_;
  Matrix frame_;
};

struct PrincipalAngle {
  double angle = 0.0;          // largest principal angle, in [0, pi/2]
  double projector_gap = 0.0;  // ||P_p - P_q||_2 by power iteration
};

/// Largest principal angle between two subspaces given orthonormal frames.
/// Throws numerical-failure if sin(angle) and the projector gap disagree by
/// more than 1e-8.
PrincipalAngle principal_angle(const Matrix& frame_p, const Matrix& frame_q);

/// Spectral norm of a symmetric matrix by power iteration.
double symmetric_operator_norm(const Matrix& a, double tolerance = 1e-14);

}  // namespace mcs
