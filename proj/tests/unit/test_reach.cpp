#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mcslab/error.hpp"
#include "mcslab/manifold.hpp"
#include "mcslab/reach.hpp"
#include "mcslab/sample.hpp"

namespace {

using mcs::Index;
using mcs::Matrix;
using mcs::Vector;

TEST(Reach, CircleConvergesToRadius) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 8), 2000, 0.01);
  const auto r = mcs::estimate_reach(s, 2);
  EXPECT_GE(r.tau, 0.99);
  EXPECT_LE(r.tau, 1.01);
  EXPECT_GT(r.quotients, 0);
  EXPECT_GE(r.p, 0);
  EXPECT_GE(r.q, 0);
}

TEST(Reach, ScalesWithRadius) {
  const auto s = mcs::sample_manifold(mcs::make_circle(3.0, 4), 500, 0.1);
  EXPECT_NEAR(mcs::estimate_reach(s).tau, 3.0, 0.03);
}

TEST(Reach, SegmentIsFlat) {
  const auto s = mcs::sample_manifold(mcs::make_line_segment(5), 50, 0.05);
  const auto r = mcs::estimate_reach(s);
  EXPECT_TRUE(r.flat());
  EXPECT_TRUE(std::isinf(r.tau));
  EXPECT_EQ(r.quotients, 0);
}

TEST(Reach, NeedsTenPoints) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 3), 9, 1.0);
  try {
    mcs::estimate_reach(s);
    FAIL();
  } catch (const mcs::Error& e) {
    EXPECT_EQ(e.code(), mcs::ErrorCode::insufficient_sample);
  }
}

TEST(Reach, ComplexExponentialMatchesBruteForceOracle) {
  // tests/oracles/geometry_oracle.py: Federer quotient on the same 5000-point grid.
  const auto s = mcs::sample_manifold(mcs::make_complex_exponential(3), 5000, 0.01);
  const auto r = mcs::estimate_reach(s, 2);
  EXPECT_NEAR(r.tau, 1.7157199165405317, 1e-9);
  EXPECT_LE(r.tau, 1.02 * std::sqrt(7.0));
}

TEST(Reach, AddingPointsNeverIncreasesEstimate) {
  const auto model = mcs::make_complex_exponential(2);
  const Matrix coarse = mcs::uniform_parameters(model.domain(), 200);
  Matrix fine(1, 400);
  for (Index i = 0; i < 200; ++i) {
    fine(0, 2 * i) = coarse(0, i);
    fine(0, 2 * i + 1) = coarse(0, i) + 0.5 / 200.0;
  }
  const double a = mcs::estimate_reach(mcs::sample_at_parameters(model, coarse, 0.5)).tau;
  const double b = mcs::estimate_reach(mcs::sample_at_parameters(model, fine, 0.5)).tau;
  EXPECT_LE(b, a);
}

TEST(Reach, ThreadCountDoesNotChangeResult) {
  const auto s = mcs::sample_manifold(mcs::make_complex_exponential(2), 600, 0.2);
  const auto a = mcs::estimate_reach(s, 1);
  const auto b = mcs::estimate_reach(s, 3);
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.q, b.q);
}

Matrix line_frame(double angle) {
  Matrix f(2, 1);
  f << std::cos(angle), std::sin(angle);
  return f;
}

TEST(PrincipalAngle, ClosedFormCases) {
  const auto same = mcs::principal_angle(line_frame(0.3), line_frame(0.3));
  EXPECT_NEAR(same.angle, 0.0, 1e-12);
  EXPECT_NEAR(same.projector_gap, 0.0, 1e-12);
  const auto ortho = mcs::principal_angle(line_frame(0.0), line_frame(std::numbers::pi / 2));
  EXPECT_NEAR(ortho.angle, std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(ortho.projector_gap, 1.0, 1e-12);
  const auto diag = mcs::principal_angle(line_frame(0.0), line_frame(std::numbers::pi / 4));
  EXPECT_NEAR(diag.angle, std::numbers::pi / 4, 1e-12);
  EXPECT_NEAR(diag.projector_gap, std::sqrt(0.5), 1e-12);
}

TEST(PrincipalAngle, SineMatchesProjectorGapOnRandomPlanes) {
  const auto s = mcs::sample_manifold(mcs::make_complex_exponential(4), 300, 0.3);
  for (Index i = 0; i < 300; i += 7) {
    const auto pa = mcs::principal_angle(s.frame(0), s.frame(i));
    EXPECT_NEAR(std::sin(pa.angle), pa.projector_gap, 1e-8);
  }
  Matrix a = Matrix::Zero(6, 2), b = Matrix::Zero(6, 2);
  a(0, 0) = a(1, 1) = 1.0;
  b(0, 0) = 1.0;
  b(2, 1) = std::sin(0.7);
  b(1, 1) = std::cos(0.7);
  const auto pa = mcs::principal_angle(a, b);
  EXPECT_NEAR(pa.angle, 0.7, 1e-12);
}

TEST(PrincipalAngle, DimensionMismatch) {
  try {
    mcs::principal_angle(Matrix::Identity(3, 1), Matrix::Identity(4, 1));
    FAIL();
  } catch (const mcs::Error& e) {
    EXPECT_EQ(e.code(), mcs::ErrorCode::invalid_argument);
  }
}

TEST(TangentProjector, IdempotentAndSymmetric) {
  const auto s = mcs::sample_manifold(mcs::make_complex_exponential(3), 100, 0.5);
  const mcs::TangentProjector p(5, s.frame(5));
  const Matrix P = p.materialize();
  EXPECT_LE(mcs::symmetric_operator_norm(P * P - P), 1e-10);
  EXPECT_LE((P - P.transpose()).norm(), 1e-14);
  const Vector v = Vector::LinSpaced(P.rows(), -1.0, 2.0);
  EXPECT_LE((p.apply(v) - P * v).norm(), 1e-12);
  Matrix bad = Matrix::Zero(3, 1);
  bad(0, 0) = 2.0;
  EXPECT_THROW(mcs::TangentProjector(0, bad), mcs::Error);
}

}  // namespace
