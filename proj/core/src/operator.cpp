#include "mcslab/operator.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mcslab/csv.hpp"
#include "mcslab/error.hpp"
#include "mcslab/parallel.hpp"
#include "mcslab/philox.hpp"

namespace mcs {

MeasurementOperator MeasurementOperator::draw(Index M, Index N, std::uint64_t seed,
                                              std::uint64_t trial, unsigned threads) {
  require(M >= 1 && N >= 1, ErrorCode::invalid_argument, "operator dimensions must be positive");
  require(M <= 0xFFFFFFFFLL && N < 0xFFFFFFFFLL, ErrorCode::invalid_argument,
          "operator dimensions exceed the counter range");
  Matrix phi(M, N);
  const double root_m = std::sqrt(static_cast<double>(M));
  parallel_for(static_cast<std::size_t>(M), threads, [&](std::size_t r) {
    for (Index c = 0; c < N; ++c) {
      phi(static_cast<Index>(r), c) =
          gaussian_at(seed, trial, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)) /
          root_m;
    }
  });
  return MeasurementOperator(std::move(phi), seed);
}

MeasurementOperator MeasurementOperator::from_matrix(Matrix phi, std::uint64_t seed) {
  require(phi.rows() >= 1 && phi.cols() >= 1, ErrorCode::invalid_argument,
          "operator dimensions must be positive");
  return MeasurementOperator(std::move(phi), seed);
}

Vector MeasurementOperator::apply(const Vector& x) const {
  require(x.size() == cols(), ErrorCode::invalid_argument,
          "apply: expected a vector of length " + std::to_string(cols()));
  return phi_ * x;
}

void MeasurementOperator::dump(std::ostream& out) const {
  out << rows() << ' ' << cols() << ' ' << seed_ << '\n';
  std::vector<std::string> fields(static_cast<std::size_t>(cols()));
  for (Index r = 0; r < rows(); ++r) {
    for (Index c = 0; c < cols(); ++c) fields[c] = csv::format_double(phi_(r, c));
    csv::write_row(out, fields);
  }
}

MeasurementOperator MeasurementOperator::load(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::io_error, "operator dump is empty");
  std::istringstream header(line);
  long long M = 0, N = 0;
  std::uint64_t seed = 0;
  require(static_cast<bool>(header >> M >> N >> seed) && M >= 1 && N >= 1, ErrorCode::io_error,
          "operator dump header must read `M N seed`");
  Matrix phi(M, N);
  for (Index r = 0; r < M; ++r) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::io_error,
            "operator dump has too few rows");
    const auto fields = csv::split_row(line);
    require(static_cast<Index>(fields.size()) == N, ErrorCode::io_error,
            "operator dump row " + std::to_string(r) + " has the wrong length");
    for (Index c = 0; c < N; ++c) phi(r, c) = std::stod(fields[c]);
  }
  return MeasurementOperator(std::move(phi), seed);
}

namespace {

Vector start_vector(Index n) {
  CounterRng rng(0x51A9u, 0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v.normalized();
}

}  // namespace

SingularValueReport singular_value_range(const MeasurementOperator& op, double tolerance) {
  const Index M = op.rows(), N = op.cols();
  require(M <= N, ErrorCode::unsupported_shape, "singular_value_range needs M <= N");
  const Matrix& phi = op.matrix();
  require(phi.cwiseAbs().maxCoeff() > 0.0, ErrorCode::degenerate_spectrum,
          "operator is the zero matrix");
  const Matrix gram = phi * phi.transpose();
  constexpr int kMaxIterations = 1000000;

  SingularValueReport report;
  report.tolerance = tolerance;

  // Largest eigenvalue of the Gram matrix.
  Vector v = start_vector(M);
  double lambda = 0.0;
  for (int it = 1;; ++it) {
    Vector w = gram * v;
    lambda = v.dot(w);
    const double residual = (w - lambda * v).norm();
    report.iterations_max = it;
    if (residual <= tolerance * lambda) break;
    require(it < kMaxIterations, ErrorCode::numerical_failure, "power iteration did not converge");
    v = w.normalized();
  }
  report.sigma_max = std::sqrt(lambda);

  // Smallest eigenvalue by inverse iteration.
  Eigen::LLT<Matrix> chol(gram);
  require(chol.info() == Eigen::Success, ErrorCode::degenerate_spectrum,
          "operator does not have full row rank");
  v = start_vector(M);
  double mu = 0.0;
  for (int it = 1;; ++it) {
    Vector w = chol.solve(v);
    const double wn = w.norm();
    require(std::isfinite(wn) && wn > 0.0, ErrorCode::degenerate_spectrum,
            "operator does not have full row rank");
    w /= wn;
    mu = w.dot(gram * w);
    const double residual = (gram * w - mu * w).norm();
    report.iterations_min = it;
    v = std::move(w);
    if (residual <= tolerance * std::max(mu, 1e-300)) break;
    require(it < kMaxIterations, ErrorCode::numerical_failure, "inverse iteration did not converge");
  }
  require(mu > 0.0, ErrorCode::degenerate_spectrum, "operator does not have full row rank");
  report.sigma_min = std::sqrt(mu);

  const double ratio = std::sqrt(static_cast<double>(N) / static_cast<double>(M));
  report.gaussian_upper = ratio + 2.0;
  report.gaussian_lower = ratio - 2.0;
  report.upper_holds = report.sigma_max <= report.gaussian_upper;
  report.lower_holds = report.sigma_min >= report.gaussian_lower;
  return report;
}

}  // namespace mcs
