#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "mcslab/error.hpp"
#include "mcslab/manifold.hpp"
#include "mcslab/sample.hpp"
#include "mcslab/toolbox.hpp"

namespace {

using mcs::Index;
using mcs::Matrix;
using mcs::Vector;

TEST(Dirichlet, KnownValues) {
  EXPECT_DOUBLE_EQ(mcs::dirichlet_kernel(7, 0.0), 7.0);
  EXPECT_NEAR(mcs::dirichlet_kernel(7, 0.5), -1.0, 1e-14);
  EXPECT_NEAR(mcs::dirichlet_kernel(7, 1e-9), 7.0, 1e-8);
}

TEST(Dirichlet, EvenAndBoundedByN) {
  for (int N : {3, 7, 31}) {
    for (int i = 0; i <= 1000; ++i) {
      const double z = 0.5 * i / 1000.0;
      const double d = mcs::dirichlet_kernel(N, z);
      EXPECT_DOUBLE_EQ(d, mcs::dirichlet_kernel(N, -z));
      EXPECT_LE(std::abs(d), N + 1e-12);
    }
  }
}

TEST(Dirichlet, InvalidArguments) {
  EXPECT_THROW(mcs::dirichlet_kernel(8, 0.1), mcs::Error);
  EXPECT_THROW(mcs::dirichlet_kernel(1, 0.1), mcs::Error);
  EXPECT_THROW(mcs::dirichlet_kernel(7, 0.6), mcs::Error);
}

TEST(Dirichlet, SideLobeMatchesOracle) {
  // tests/oracles/geometry_oracle.py, 10^6 grid points.
  EXPECT_NEAR(mcs::dirichlet_side_lobe(7, 1000000), 1.112611790921077, 1e-9);
  EXPECT_NEAR(mcs::dirichlet_side_lobe(31, 1000000) / 31, 0.12971342167376979, 1e-9);
  EXPECT_NEAR(mcs::dirichlet_side_lobe(127, 1000000) / 127, 0.12845375627523778, 1e-9);
  EXPECT_LE(mcs::dirichlet_side_lobe(31, 1000000), 0.24 * 31);
}

TEST(UnitBall, Volumes) {
  EXPECT_DOUBLE_EQ(mcs::unit_ball_volume(1), 2.0);
  EXPECT_NEAR(mcs::unit_ball_volume(2), std::numbers::pi, 1e-15);
  EXPECT_NEAR(mcs::unit_ball_volume(5), 5.263789013914324, 1e-13);
  EXPECT_NEAR(mcs::unit_ball_volume(5), 8.0 * std::numbers::pi * std::numbers::pi / 15.0, 1e-13);
  EXPECT_THROW(mcs::unit_ball_volume(0), mcs::Error);
}

TEST(UnitBall, Bracket) {
  EXPECT_FALSE(mcs::unit_ball_volume_in_bracket(1));
  EXPECT_GT(mcs::unit_ball_volume_bracket(1).first, 2.0);
  for (int K = 2; K <= 11; ++K) {
    EXPECT_TRUE(mcs::unit_ball_volume_in_bracket(K)) << K;
    const auto [lo, hi] = mcs::unit_ball_volume_bracket(K);
    EXPECT_LE(lo, mcs::unit_ball_volume(K));
    EXPECT_GE(hi, mcs::unit_ball_volume(K));
  }
}

Vector circle_point(double t) {
  Vector v(2);
  v << std::cos(t), std::sin(t);
  return v;
}

Matrix circle_frame(double t) {
  Matrix f(2, 1);
  f << -std::sin(t), std::cos(t);
  return f;
}

TEST(Slacks, ChordTangentAngleEqualityOnCircle) {
  const double t = 2.0 * std::asin(0.25);  // chord 0.5
  const Vector p = circle_point(0.0), q = circle_point(t);
  EXPECT_NEAR((q - p).norm(), 0.5, 1e-15);
  EXPECT_NEAR(mcs::chord_tangent_angle_slack(p, q, circle_frame(0.0), 1.0), 0.0, 1e-9);
}

TEST(Slacks, GeodesicVsChordOnCircle) {
  const double arc = 2.0 * std::asin(0.25);
  EXPECT_NEAR(arc, 0.50536, 1e-5);
  EXPECT_DOUBLE_EQ(mcs::geodesic_chord_bound(0.5, 1.0), 1.0);
  EXPECT_NEAR(mcs::geodesic_vs_chord_slack(0.5, arc, 1.0), 1.0 - arc, 1e-15);
}

TEST(Slacks, ProjectorDifferenceWithIdenticalFrames) {
  const Matrix f = circle_frame(0.4);
  EXPECT_NEAR(mcs::projector_difference_slack(f, f, 0.1, 1.0), std::sqrt(0.2), 1e-12);
}

TEST(Slacks, SecantPerturbationIdentical) {
  const Vector a = circle_point(0.0), b = circle_point(1.0);
  EXPECT_NEAR(mcs::secant_perturbation_slack(a, b, a, b), 0.0, 1e-15);
}

TEST(Slacks, PolylineHelpers) {
  const double h = 1e-3;
  EXPECT_NEAR(mcs::polyline_curvature(circle_point(-h), circle_point(0), circle_point(h)), 1.0,
              1e-5);
  Matrix pts(2, 4000);
  for (Index i = 0; i < 4000; ++i) pts.col(i) = circle_point(2 * std::numbers::pi * i / 4000.0);
  const double r = 0.2;
  // Arc inside a ball of radius r centred on the circle: 4 asin(r/2).
  EXPECT_NEAR(mcs::polyline_length_in_ball(pts, true, circle_point(0), r), 4 * std::asin(r / 2),
              1e-5);
  EXPECT_NEAR(mcs::local_volume_bound(1, r, 1.0), std::sqrt(1 - r * r / 4) * 2 * r, 1e-15);
}

class Suites : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    circle_ = new mcs::ManifoldSample(mcs::sample_manifold(mcs::make_circle(1.0, 4), 4000, 0.01));
    cexp_ = new mcs::ManifoldSample(
        mcs::sample_manifold(mcs::make_complex_exponential(3), 4000, 0.05));
  }
  static void TearDownTestSuite() {
    delete circle_;
    delete cexp_;
  }
  static mcs::ManifoldSample* circle_;
  static mcs::ManifoldSample* cexp_;
};

mcs::ManifoldSample* Suites::circle_ = nullptr;
mcs::ManifoldSample* Suites::cexp_ = nullptr;

TEST_F(Suites, CircleSuitePasses) {
  mcs::ToolboxOptions opts;
  opts.threads = 2;
  for (const auto& id : mcs::default_suite_ids()) {
    const auto r = mcs::check_toolbox_property(*circle_, id, opts);
    EXPECT_TRUE(r.pass) << id << " slack " << r.worst_slack;
    EXPECT_GE(r.worst_slack, -mcs::kSlackAllowance) << id;
    EXPECT_GT(r.pairs_tested, 0) << id;
    EXPECT_FALSE(r.tau_estimated);
    EXPECT_DOUBLE_EQ(r.tau, 1.0);
  }
}

TEST_F(Suites, ComplexExponentialSuitePasses) {
  mcs::ToolboxOptions opts;
  opts.threads = 2;
  for (const auto& id : mcs::default_suite_ids()) {
    const auto r = mcs::check_toolbox_property(*cexp_, id, opts);
    EXPECT_TRUE(r.pass) << id << " slack " << r.worst_slack;
    EXPECT_TRUE(r.tau_estimated) << id;
  }
}

TEST_F(Suites, ChordTangentAngleIsTightOnCircle) {
  const auto r = mcs::check_toolbox_property(*circle_, "chord_tangent_angle");
  EXPECT_LE(std::abs(r.worst_slack), 1e-9);
}

TEST_F(Suites, DeterministicForSeed) {
  mcs::ToolboxOptions a, b;
  a.seed = b.seed = 5;
  b.threads = 3;
  const auto ra = mcs::check_toolbox_property(*circle_, "secant_perturbation", a);
  const auto rb = mcs::check_toolbox_property(*circle_, "secant_perturbation", b);
  EXPECT_EQ(ra.worst_slack, rb.worst_slack);
  EXPECT_EQ(ra.worst_first, rb.worst_first);
  EXPECT_EQ(ra.worst_second, rb.worst_second);
}

TEST_F(Suites, Errors) {
  try {
    mcs::check_toolbox_property(*circle_, "no_such_property");
    FAIL();
  } catch (const mcs::Error& e) {
    EXPECT_EQ(e.code(), mcs::ErrorCode::invalid_argument);
  }
  mcs::ToolboxOptions zero;
  zero.pair_budget = 0;
  EXPECT_THROW(mcs::check_toolbox_property(*circle_, "geodesic_vs_chord", zero), mcs::Error);
}

TEST(Suite, NoApplicablePairsOnTinyTau) {
  const auto s = mcs::sample_manifold(mcs::make_circle(1.0, 2), 50, 0.2);
  mcs::ToolboxOptions opts;
  opts.tau = 1e-6;  // every chord exceeds tau / 2
  try {
    mcs::check_toolbox_property(s, "geodesic_vs_chord", opts);
    FAIL();
  } catch (const mcs::Error& e) {
    EXPECT_EQ(e.code(), mcs::ErrorCode::no_applicable_pairs);
  }
}

TEST(Suite, IdListsAgree) {
  const auto& all = mcs::toolbox_property_ids();
  const auto& suite = mcs::default_suite_ids();
  EXPECT_EQ(suite.size(), 8u);
  for (const auto& id : suite) EXPECT_NE(std::find(all.begin(), all.end(), id), all.end());
}

TEST(Suite, ReportJson) {
  mcs::PropertyReport r;
  r.property_id = "local_volume";
  r.pairs_tested = 12;
  r.worst_slack = 0.25;
  r.pass = true;
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j.at("property_id"), "local_volume");
  EXPECT_EQ(j.at("pairs_tested"), 12);
  EXPECT_EQ(j.at("worst_slack"), 0.25);
  EXPECT_EQ(j.at("pass"), true);
}

}  // namespace
