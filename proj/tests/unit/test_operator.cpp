#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "mcslab/error.hpp"
#include "mcslab/operator.hpp"
#include "mcslab/philox.hpp"

namespace {

using mcs::Index;
using mcs::Matrix;
using mcs::Vector;

mcs::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const mcs::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return mcs::ErrorCode::io_error;
}

TEST(Operator, DeterministicPerSeed) {
  const auto a = mcs::MeasurementOperator::draw(3, 1024, 7);
  const auto b = mcs::MeasurementOperator::draw(3, 1024, 7, 0, 3);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_EQ(a.seed(), 7u);
  const auto c = mcs::MeasurementOperator::draw(3, 1024, 8);
  EXPECT_NE(a.matrix(), c.matrix());
  const auto d = mcs::MeasurementOperator::draw(3, 1024, 7, 1);
  EXPECT_NE(a.matrix(), d.matrix());
}

TEST(Operator, EntriesAreScaledCounterGaussians) {
  const auto op = mcs::MeasurementOperator::draw(5, 9, 42, 3);
  for (Index r = 0; r < 5; ++r)
    for (Index c = 0; c < 9; ++c)
      EXPECT_EQ(op.matrix()(r, c), mcs::gaussian_at(42, 3, static_cast<std::uint32_t>(r),
                                                    static_cast<std::uint32_t>(c)) /
                                       std::sqrt(5.0));
}

TEST(Operator, MomentsMatchVarianceOneOverM) {
  const auto op = mcs::MeasurementOperator::draw(100, 1000, 2024);
  const double n = 100.0 * 1000.0;
  const double mean = op.matrix().sum() / n;
  const double var = (op.matrix().array() - mean).square().sum() / (n - 1);
  EXPECT_NEAR(var, 0.01, 0.05 * 0.01);
  EXPECT_LE(std::abs(mean), 5.0 * std::sqrt(0.01 / n));
}

TEST(Operator, ZeroDimensionsRejected) {
  EXPECT_EQ(code_of([] { mcs::MeasurementOperator::draw(0, 4, 1); }),
            mcs::ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { mcs::MeasurementOperator::draw(4, 0, 1); }),
            mcs::ErrorCode::invalid_argument);
}

TEST(Apply, LinearAndZero) {
  const auto op = mcs::MeasurementOperator::draw(20, 64, 3);
  mcs::CounterRng rng(3, 1);
  Vector x1(64), x2(64);
  for (Index i = 0; i < 64; ++i) {
    x1[i] = rng.normal();
    x2[i] = rng.normal();
  }
  EXPECT_EQ(op.apply(Vector::Zero(64)), Vector::Zero(20));
  const Vector lhs = op.apply(1.5 * x1 - 0.25 * x2);
  const Vector rhs = 1.5 * op.apply(x1) - 0.25 * op.apply(x2);
  EXPECT_LE((lhs - rhs).norm(), 1e-12 * rhs.norm());
  EXPECT_LE((op.apply(2.0 * x1) - 2.0 * op.apply(x1)).norm(), 1e-12);
  EXPECT_EQ(code_of([&] { op.apply(Vector::Zero(63)); }), mcs::ErrorCode::invalid_argument);
}

TEST(Apply, SingleColumnOperator) {
  Matrix phi = Matrix::Zero(3, 5);
  phi.col(2) << 1.0, -2.0, 0.5;
  const auto op = mcs::MeasurementOperator::from_matrix(phi);
  Vector x = Vector::Ones(5);
  x[2] = 3.0;
  EXPECT_EQ(op.apply(x), 3.0 * phi.col(2));
}

TEST(Dump, RoundTripsBitExactly) {
  const auto op = mcs::MeasurementOperator::draw(4, 6, 99);
  std::stringstream io;
  op.dump(io);
  std::string header;
  std::getline(io, header);
  EXPECT_EQ(header, "4 6 99");
  io.seekg(0);
  const auto back = mcs::MeasurementOperator::load(io);
  EXPECT_EQ(back.matrix(), op.matrix());
  EXPECT_EQ(back.seed(), 99u);
}

TEST(Dump, MalformedInputIsIoError) {
  std::istringstream empty("");
  EXPECT_EQ(code_of([&] { mcs::MeasurementOperator::load(empty); }), mcs::ErrorCode::io_error);
  std::istringstream short_row("2 3 1\n1,2,3\n4,5\n");
  EXPECT_EQ(code_of([&] { mcs::MeasurementOperator::load(short_row); }), mcs::ErrorCode::io_error);
}

TEST(SingularValues, Identity) {
  const auto r = mcs::singular_value_range(mcs::MeasurementOperator::from_matrix(Matrix::Identity(8, 8)));
  EXPECT_NEAR(r.sigma_max, 1.0, 1e-8);
  EXPECT_NEAR(r.sigma_min, 1.0, 1e-8);
}

TEST(SingularValues, Errors) {
  EXPECT_EQ(code_of([] { mcs::singular_value_range(mcs::MeasurementOperator::from_matrix(Matrix::Zero(3, 5))); }),
            mcs::ErrorCode::degenerate_spectrum);
  EXPECT_EQ(code_of([] { mcs::singular_value_range(mcs::MeasurementOperator::draw(6, 5, 1)); }),
            mcs::ErrorCode::unsupported_shape);
}

TEST(SingularValues, MatchesDirectDecomposition) {
  const auto op = mcs::MeasurementOperator::draw(30, 90, 5);
  const auto r = mcs::singular_value_range(op);
  const Eigen::JacobiSVD<Matrix> svd(op.matrix());
  EXPECT_NEAR(r.sigma_max, svd.singularValues()[0], 1e-8 * svd.singularValues()[0]);
  EXPECT_NEAR(r.sigma_min, svd.singularValues()[29], 1e-8 * svd.singularValues()[0]);
  EXPECT_GE(r.sigma_max, r.sigma_min);
  EXPECT_GT(r.sigma_min, 0.0);
  EXPECT_DOUBLE_EQ(r.gaussian_upper, std::sqrt(3.0) + 2.0);
}

TEST(SingularValues, NormDominatesRandomDirections) {
  const auto op = mcs::MeasurementOperator::draw(16, 48, 8);
  const double norm = mcs::singular_value_range(op).sigma_max;
  mcs::CounterRng rng(8, 2);
  double best = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Vector x(48);
    for (Index i = 0; i < 48; ++i) x[i] = rng.normal();
    best = std::max(best, op.apply(x.normalized()).norm());
  }
  EXPECT_LE(best, norm + 1e-6);
}

TEST(SingularValues, GaussianUpperBoundUsuallyHolds) {
  int holds = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = mcs::singular_value_range(mcs::MeasurementOperator::draw(100, 400, seed));
    EXPECT_DOUBLE_EQ(r.gaussian_upper, 4.0);
    holds += r.sigma_max <= 4.0 ? 1 : 0;
  }
  EXPECT_GE(holds, 99);
}

}  // namespace
