#pragma once

#include <cstdint>
#include <iosfwd>

#include "mcslab/types.hpp"

namespace mcs {

/// Dense M x N matrix with i.i.d. N(0, 1/M) entries.  Entry (r, c) of trial t
/// is gaussian_at(seed, t, r, c) / sqrt(M), so a draw depends only on
/// (M, N, seed, trial).
class MeasurementOperator {
 public:
  static MeasurementOperator draw(Index M, Index N, std::uint64_t seed, std::uint64_t trial = 0,
                                  unsigned threads = 1);
  /// Wraps an arbitrary matrix (identity, zero, ...) for testing.
  static MeasurementOperator from_matrix(Matrix phi, std::uint64_t seed = 0);

  Index rows() const { return phi_.rows(); }
  Index cols() const { return phi_.cols(); }
  std::uint64_t seed() const { return seed_; }
  const Matrix& matrix() const { return phi_; }

  Vector apply(const Vector& x) const;

  /// First line `M N seed`, then M comma-separated rows of N doubles.
  void dump(std::ostream& out) const;
  static MeasurementOperator load(std::istream& in);

 private:
  MeasurementOperator(Matrix phi, std::uint64_t seed) : phi_(std::move(phi)), seed_(seed) {}

  Matrix phi_;
  std::uint64_t seed_;
};

struct SingularValueReport {
  double sigma_max = 0.0;
  double sigma_min = 0.0;  // smallest singular value (nonzero for full row rank)
  double tolerance = 1e-8;
  int iterations_max = 0;
  int iterations_min = 0;
  double gaussian_upper = 0.0;  // sqrt(N/M) + 2
  double gaussian_lower = 0.0;  // sqrt(N/M) - 2
  bool upper_holds = false;
  bool lower_holds = false;
};

/// Extremal singular values by power iteration on Phi Phi^T and inverse
/// iteration through its Cholesky factor.  Requires M <= N.
SingularValueReport singular_value_range(const MeasurementOperator& op, double tolerance = 1e-8);

}  // namespace mcs
