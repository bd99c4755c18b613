#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <sstream>

#include "mcslab/csv.hpp"
#include "mcslab/error.hpp"
#include "mcslab/manifold.hpp"
#include "mcslab/philox.hpp"
#include "mcslab/sample.hpp"

namespace {

using mcs::Index;
using mcs::Matrix;
using mcs::Vector;
constexpr double kPi = std::numbers::pi;

Vector theta1(double t) { return Vector::Constant(1, t); }

mcs::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const mcs::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mcs::Error thrown";
  return mcs::ErrorCode::io_error;
}

TEST(ParameterDomain, CircleMetricWrapsAround) {
  const auto d = mcs::ParameterDomain::circle(2 * kPi);
  EXPECT_NEAR(d.distance(theta1(0.1), theta1(2 * kPi - 0.1)), 0.2, 1e-12);
  EXPECT_NEAR(d.distance(theta1(0.0), theta1(kPi)), kPi, 1e-12);
  EXPECT_NEAR(d.canonical(theta1(-0.5))(0), 2 * kPi - 0.5, 1e-12);
  EXPECT_NEAR(d.canonical(theta1(2 * kPi + 0.25))(0), 0.25, 1e-12);
}

TEST(ParameterDomain, MetricAxioms) {
  const auto circle = mcs::ParameterDomain::circle(1.0);
  const auto box = mcs::ParameterDomain::box({0.0, -1.0}, {2.0, 1.0});
  mcs::CounterRng rng(5, 0);
  for (int i = 0; i < 100; ++i) {
    const Vector a = theta1(rng.uniform()), b = theta1(rng.uniform());
    EXPECT_DOUBLE_EQ(circle.distance(a, b), circle.distance(b, a));
    EXPECT_GE(circle.distance(a, b), 0.0);
    EXPECT_EQ(circle.distance(a, a), 0.0);
    Vector p(2), q(2);
    p << 2 * rng.uniform(), 2 * rng.uniform() - 1;
    q << 2 * rng.uniform(), 2 * rng.uniform() - 1;
    EXPECT_DOUBLE_EQ(box.distance(p, q), (p - q).norm());
  }
  EXPECT_NEAR(circle.distance(theta1(0.0), theta1(1.0)), 0.0, 1e-15);
}

TEST(ParameterDomain, RejectsInfiniteExtent) {
  EXPECT_EQ(code_of([] { mcs::ParameterDomain::interval(0.0, INFINITY); }),
            mcs::ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { mcs::ParameterDomain::interval(1.0, 1.0); }),
            mcs::ErrorCode::invalid_argument);
}

TEST(Circle, ChartValues) {
  const auto c2 = mcs::make_circle(2.0, 4);
  Vector expected(4);
  expected << 2, 0, 0, 0;
  EXPECT_EQ(c2.point(0.0), expected);
  const auto c1 = mcs::make_circle(1.0, 3);
  const Vector quarter = c1.point(kPi / 2);
  EXPECT_NEAR(quarter(0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(quarter(1), 1.0);
  EXPECT_EQ(quarter(2), 0.0);
}

TEST(Circle, Metadata) {
  const auto c = mcs::make_circle(1.0, 3);
  EXPECT_EQ(c.intrinsic_dimension(), 1);
  EXPECT_EQ(c.domain().topology(), mcs::Topology::circle);
  EXPECT_DOUBLE_EQ(c.domain().extent(0), 2 * kPi);
  EXPECT_DOUBLE_EQ(*c.metadata().reach, 1.0);
  EXPECT_DOUBLE_EQ(*c.metadata().volume, 2 * kPi);
}

TEST(Circle, InvalidArguments) {
  EXPECT_EQ(code_of([] { mcs::make_circle(0.0, 3); }), mcs::ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { mcs::make_circle(-1.0, 3); }), mcs::ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { mcs::make_circle(1.0, 1); }), mcs::ErrorCode::invalid_argument);
}

TEST(GaussianPulse, PeakFollowsShift) {
  const auto p = mcs::make_gaussian_pulse(0.05, 1024);
  Index arg = -1;
  p.point(0.5).maxCoeff(&arg);
  EXPECT_EQ(arg, 512);
  EXPECT_FALSE(p.metadata().reach.has_value());
  EXPECT_FALSE(p.metadata().volume.has_value());
}

TEST(GaussianPulse, DeterministicAndMatchesOracleDistance) {
  const auto p = mcs::make_gaussian_pulse(0.05, 1024);
  const Vector a = p.point(0.2), b = p.point(0.2);
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * a.size()));
  // tests/oracles/geometry_oracle.py
  EXPECT_NEAR((p.point(0.3) - p.point(0.7)).norm(), 13.472165895195632, 1e-11);
}

TEST(GaussianPulse, InvalidArguments) {
  EXPECT_EQ(code_of([] { mcs::make_gaussian_pulse(0.0, 16); }), mcs::ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { mcs::make_gaussian_pulse(0.1, 1); }), mcs::ErrorCode::invalid_argument);
}

TEST(ComplexExponential, UnitModulusEntries) {
  const auto m = mcs::make_complex_exponential(1);
  EXPECT_EQ(m.ambient_dimension(), 6);
  const Vector x0 = m.point(0.0);
  for (Index k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(x0(2 * k), 1.0);
    EXPECT_DOUBLE_EQ(x0(2 * k + 1), 0.0);
  }
  const auto m7 = mcs::make_complex_exponential(7);
  mcs::CounterRng rng(1, 0);
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(m7.point(rng.uniform()).norm(), std::sqrt(15.0), 1e-12);
  EXPECT_DOUBLE_EQ(*m7.metadata().reach_upper_bound, std::sqrt(15.0));
  EXPECT_FALSE(m7.metadata().reach.has_value());
}

TEST(ComplexExponential, ConstantSpeed) {
  const auto m = mcs::make_complex_exponential(1);
  for (double t : {0.0, 0.13, 0.5, 0.77}) {
    // 2 pi sqrt 2, tests/oracles/bounds_oracle.py
    EXPECT_NEAR(m.analytic_jacobian(theta1(t)).norm(), 8.885765876316732, 1e-12);
  }
  EXPECT_EQ(code_of([] { mcs::make_complex_exponential(0); }), mcs::ErrorCode::invalid_argument);
}

TEST(LineSegment, Chart) {
  const auto s = mcs::make_line_segment(3);
  EXPECT_EQ(s.point(0.0), Vector::Zero(3));
  Vector e1 = Vector::Zero(3);
  e1(0) = 1.0;
  EXPECT_EQ(s.point(1.0), e1);
  EXPECT_EQ(s.point(0.25), 0.25 * e1);
  EXPECT_TRUE(std::isinf(*s.metadata().reach));
  EXPECT_DOUBLE_EQ(*s.metadata().volume, 1.0);
  EXPECT_EQ(code_of([] { mcs::make_line_segment(0); }), mcs::ErrorCode::invalid_argument);
}

TEST(Models, AnalyticTangentMatchesFiniteDifferences) {
  const std::vector<mcs::ManifoldModel> models{mcs::make_circle(1.5, 5),
                                               mcs::make_gaussian_pulse(0.05, 256),
                                               mcs::make_complex_exponential(5),
                                               mcs::make_line_segment(4)};
  mcs::CounterRng rng(17, 0);
  for (const auto& m : models) {
    ASSERT_TRUE(m.has_analytic_tangent()) << m.name();
    for (int i = 0; i < 10; ++i) {
      const double lo = m.domain().lower(0), ext = m.domain().extent(0);
      const Vector t = theta1(lo + ext * (0.05 + 0.9 * rng.uniform()));
      const Matrix a = m.analytic_jacobian(t);
      const Matrix fd = m.finite_difference_jacobian(t, 1e-5 * ext);
      EXPECT_LE((a - fd).norm(), 1e-5 * a.norm()) << m.name();
    }
  }
}

TEST(Models, OrthonormalizeRejectsRankDeficient) {
  Matrix j = Matrix::Zero(4, 2);
  j(0, 0) = 1.0;
  j(0, 1) = 2.0;
  EXPECT_EQ(code_of([&] { mcs::orthonormalize(j); }), mcs::ErrorCode::numerical_failure);
  Matrix ok(3, 2);
  ok << 1, 1, 0, 1, 0, 0;
  const Matrix q = mcs::orthonormalize(ok);
  EXPECT_LE((q.transpose() * q - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(Sample, UniformPlacementOnCircle) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 3), 4, 1.5);
  ASSERT_EQ(s.size(), 4);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(s.parameter(i)(0), i * kPi / 2, 1e-15);
  EXPECT_TRUE(s.ordered());
  EXPECT_TRUE(s.closed());
}

TEST(Sample, DisconnectedGraphNamesRadius) {
  try {
    mcs::sample_manifold(mcs::make_circle(1.0, 3), 2, 1e-3);
    FAIL() << "expected graph-disconnected";
  } catch (const mcs::Error& e) {
    EXPECT_EQ(e.code(), mcs::ErrorCode::graph_disconnected);
    // Points are 2 apart; doubling 1e-3 reaches 2.048.
    EXPECT_NE(std::string(e.what()).find("2.048"), std::string::npos) << e.what();
  }
}

TEST(Sample, CircleFramesAreTangent) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 3), 1000, 0.02);
  for (Index i = 0; i < s.size(); ++i) {
    const Matrix& f = s.frame(i);
    EXPECT_LE(std::abs(f.col(0).dot(s.point(i))), 1e-8);
    EXPECT_LE(std::abs(f.col(0).squaredNorm() - 1.0), 1e-10);
  }
}

TEST(Sample, FiniteDifferenceFramesAreOrthonormal) {
  // The pulse carries an analytic tangent, so strip it to exercise the FD path.
  const auto pulse = mcs::make_gaussian_pulse(0.05, 128);
  const mcs::ManifoldModel no_tangent(
      "pulse-fd", pulse.domain(), pulse.ambient_dimension(),
      [pulse](const Vector& t) { return pulse.point(t); }, std::nullopt, {});
  const auto s = mcs::sample_manifold(no_tangent, 200, 1.0);
  for (Index i = 0; i < s.size(); ++i) {
    const Matrix& f = s.frame(i);
    EXPECT_LE(std::abs(f.col(0).squaredNorm() - 1.0), 1e-10);
    const Vector exact = pulse.analytic_jacobian(s.parameter(i)).col(0).normalized();
    EXPECT_GE(std::abs(exact.dot(f.col(0))), 1.0 - 1e-6);
  }
}

class CircleGeodesics : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sample_ = new mcs::ManifoldSample(mcs::sample_manifold(mcs::make_circle(1.0, 3), 2000, 0.01));
  }
  static void TearDownTestSuite() { delete sample_; }
  static mcs::ManifoldSample* sample_;
};
mcs::ManifoldSample* CircleGeodesics::sample_ = nullptr;

TEST_F(CircleGeodesics, ZeroOnDiagonalAndSymmetric) {
  EXPECT_EQ(sample_->geodesic_distance(17, 17), 0.0);
  EXPECT_EQ(sample_->geodesic_distance(3, 911), sample_->geodesic_distance(911, 3));
  EXPECT_GT(sample_->geodesic_distance(3, 4), 0.0);
}

TEST_F(CircleGeodesics, QuarterArc) {
  EXPECT_NEAR(sample_->geodesic_distance(0, 500), kPi / 2, 0.01 * kPi / 2);
}

TEST_F(CircleGeodesics, TriangleInequality) {
  mcs::CounterRng rng(2, 0);
  for (int t = 0; t < 100; ++t) {
    const Index i = static_cast<Index>(rng.below(2000));
    const Index j = static_cast<Index>(rng.below(2000));
    const Index k = static_cast<Index>(rng.below(2000));
    const auto di = sample_->geodesic_distances_from(i);
    const auto dj = sample_->geodesic_distances_from(j);
    EXPECT_LE(di[k], (di[j] + dj[k]) * (1 + 1e-14));
  }
}

TEST_F(CircleGeodesics, IsometricToParameter) {
  const auto& domain = sample_->model().domain();
  mcs::CounterRng rng(4, 0);
  for (int t = 0; t < 30; ++t) {
    const Index i = static_cast<Index>(rng.below(2000));
    const Index j = static_cast<Index>(rng.below(2000));
    if (i == j) continue;
    const double param = domain.distance(sample_->parameter(i), sample_->parameter(j));
    EXPECT_LE(std::abs(sample_->geodesic_distance(i, j) - param) / param, 0.02);
  }
}

TEST_F(CircleGeodesics, RefinementDoesNotInflate) {
  const auto fine = mcs::sample_manifold(mcs::make_circle(1.0, 3), 4000, 0.005);
  for (Index j : {1, 7, 250, 500, 999, 1400}) {
    const double coarse = sample_->geodesic_distance(0, j);
    const double refined = fine.geodesic_distance(0, 2 * j);
    EXPECT_LE(refined, 1.01 * coarse);
  }
}

TEST_F(CircleGeodesics, BetweenArbitraryPoints) {
  const auto& m = sample_->model();
  EXPECT_NEAR(sample_->geodesic_between(m.point(0.3001), m.point(1.2999)), 0.9998, 0.01);
  EXPECT_EQ(sample_->geodesic_between(m.point(0.5), m.point(0.5)), 0.0);
  Vector far = Vector::Zero(3);
  far(2) = 5.0;
  EXPECT_EQ(code_of([&] { sample_->geodesic_between(far, m.point(0.0)); }),
            mcs::ErrorCode::graph_disconnected);
}

TEST_F(CircleGeodesics, InvalidIndex) {
  EXPECT_EQ(code_of([] { sample_->geodesic_distance(-1, 2); }), mcs::ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { sample_->geodesic_distance(0, 2000); }),
            mcs::ErrorCode::invalid_argument);
}

TEST(Sample, CsvExport) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 2), 3, 2.0);
  std::ostringstream out;
  s.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "param_0,x_0,x_1");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1,0");
  std::getline(in, line);
  const auto fields = mcs::csv::split_row(line);
  ASSERT_EQ(fields.size(), 3u);
  EXPECT_EQ(std::stod(fields[0]), 2 * kPi / 3);  // 17 digits round-trip exactly
  EXPECT_EQ(out.str().find('\r'), std::string::npos);
}

TEST(Sample, ConnectingRadiusIsLongestSpanningEdge) {
  Matrix pts(1, 4);
  pts << 0.0, 1.0, 3.0, 3.5;
  EXPECT_DOUBLE_EQ(mcs::connecting_radius(pts), 2.0);
  const auto g = mcs::build_radius_graph(pts, 1.0);
  EXPECT_EQ(g.edge_count(), 4);  // 0-1 and 2-3, both directions
}

}  // namespace
