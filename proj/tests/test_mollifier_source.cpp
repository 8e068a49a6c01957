#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "egv/medium.hpp"
#include "egv/mollifier.hpp"
#include "egv/source.hpp"

using namespace egv;

namespace {

// Composite Simpson on [0, a]; the integrands are smooth polynomials in r.
template <class F>
double simpson(F f, double a, int n) {
  const double h = a / n;
  double s = f(0.0) + f(a);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Mollifier, RequiresPositiveSupport) {
  EXPECT_THROW(Mollifier(0.0), std::invalid_argument);
  EXPECT_THROW(Mollifier(-0.4), std::invalid_argument);
}

TEST(Mollifier, UnitMass) {
  const Mollifier q(0.4);
  const double a = q.support_radius();
  EXPECT_DOUBLE_EQ(a, 0.2);
  const double mass =
      4.0 * std::numbers::pi * simpson([&](double r) { return q.value(r) * r * r; }, a, 2000);
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Mollifier, VanishesSmoothlyAtTheEdge) {
  const Mollifier q(0.5);
  const double a = q.support_radius();
  EXPECT_DOUBLE_EQ(q.value(a), 0.0);
  EXPECT_DOUBLE_EQ(q.derivative(a), 0.0);
  EXPECT_DOUBLE_EQ(q.value(a + 0.1), 0.0);
  // C^2 contact: q'' ~ (1 - r^2/a^2) near the edge, so q' shrinks quadratically
  const double e1 = std::fabs(q.derivative(a - 1e-3));
  const double e2 = std::fabs(q.derivative(a - 2e-3));
  EXPECT_LT(e1, e2 / 3.0);
}

TEST(Mollifier, PeakValueMatchesNormalization) {
  const Mollifier q(0.4);
  const double a = q.support_radius();
  EXPECT_DOUBLE_EQ(q.value(0.0), 315.0 / (64.0 * std::numbers::pi * a * a * a));
  EXPECT_DOUBLE_EQ(q.value(0.0), q.normalization());
}

TEST(Mollifier, SlopeOverRIsConsistent) {
  const Mollifier q(0.4);
  for (double r : {1e-8, 0.03, 0.1, 0.15, 0.19}) {
    EXPECT_NEAR(q.slope_over_r(r) * r, q.derivative(r), 1e-12 * std::fabs(q.derivative(r)) + 1e-15);
    EXPECT_DOUBLE_EQ(q.slope_over_r_from_r2(r * r), q.slope_over_r(r));
  }
  // finite limit at the origin
  EXPECT_DOUBLE_EQ(q.slope_over_r(0.0), -6.0 * q.normalization() / (0.2 * 0.2));
}

TEST(SourceModel, MakeProjectsOutTheTrace) {
  const SymMat3 raw{2.0, 0.3, -0.1, 1.0, 0.5, 0.0};  // trace 3
  const SourceModel s = SourceModel::make(raw, {0.1, 0.0, -0.1}, 0.4);
  EXPECT_NEAR(s.moment.trace(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.moment.m12, raw.m12);
  EXPECT_DOUBLE_EQ(s.trace_removed, 1.0);
  EXPECT_DOUBLE_EQ(s.mollifier().d0, 0.4);
  EXPECT_THROW(SourceModel::make(raw, {0, 0, 0}, 0.0), std::invalid_argument);
}

TEST(SourceField, MatchesMinusMomentTimesBumpGradient) {
  const SymMat3 m{1.2, -0.5, 0.6, 0.8, -0.7, -2.0};
  const Vec3 p{0.05, -0.02, 0.1};
  const SourceModel src = SourceModel::make(m, p, 0.4);
  const Mollifier q = src.mollifier();
  auto bump = [&](const Vec3& x) { return q.value((x - p).norm()); };
  const double d = 1e-6;
  for (const Vec3& x : {Vec3{0.1, 0.0, 0.05}, Vec3{-0.05, 0.08, 0.12}, Vec3{0.05, 0.1, 0.1}}) {
    Vec3 grad_q;
    for (int c = 0; c < 3; ++c) {
      Vec3 xp = x, xm = x;
      xp[c] += d;
      xm[c] -= d;
      grad_q[c] = (bump(xp) - bump(xm)) / (2.0 * d);
    }
    const Vec3 want = src.moment.apply(grad_q) * -1.0;
    const Vec3 got = source_field(src, x);
    const double scale = std::max(want.norm(), 1.0);
    EXPECT_NEAR(got.x, want.x, 1e-4 * scale);
    EXPECT_NEAR(got.y, want.y, 1e-4 * scale);
    EXPECT_NEAR(got.z, want.z, 1e-4 * scale);
  }
}

TEST(SourceField, SupportedInTheBumpBall) {
  const SourceModel src =
      SourceModel::make({1, 0, 0, 1, 0, -2}, {0.1, 0.1, 0.0}, 0.4);
  EXPECT_DOUBLE_EQ(source_field(src, {0.31, 0.1, 0.0}).norm(), 0.0);  // r = 0.21 > d0/2
  EXPECT_GT(source_field(src, {0.2, 0.1, 0.0}).norm(), 0.0);
  // the center itself carries no force: grad q(0) = 0
  EXPECT_DOUBLE_EQ(source_field(src, {0.1, 0.1, 0.0}).norm(), 0.0);
}

TEST(QuietTime, MatchesConeSlopeTimesSupportRadius) {
  const ElasticMedium medium(2.0, 1.0, 1.0);
  const SourceModel src = SourceModel::make({1, 0, 0, 1, 0, -2}, {0, 0, 0}, 0.4);
  EXPECT_NEAR(boundary_quiet_time(src, medium), 0.2 / (2.0 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(medium.cp(), 2.0, 1e-15);
  EXPECT_NEAR(medium.cs(), 1.0, 1e-15);
  EXPECT_NEAR(medium.cone_slope(), 1.0 / (std::sqrt(2.0) * medium.cp()), 1e-15);
}

TEST(ElasticMedium, RejectsNonPositiveParameters) {
  EXPECT_THROW(ElasticMedium(0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ElasticMedium(2.0, -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ElasticMedium(2.0, 1.0, 0.0), std::invalid_argument);
}

TEST(ValidateSource, FlagsEachViolation) {
  const SourceBounds bounds;  // [0.5, 5]
  const double R = 1.0;

  const SourceModel ok = SourceModel::make({1.2, -0.5, 0.6, 0.8, -0.7, -2.0}, {0.05, 0, 0}, 0.4);
  EXPECT_TRUE(validate_source(ok, R, bounds).empty());

  const SourceModel weak = SourceModel::make({0.1, 0, 0, 0.1, 0, -0.2}, {0.05, 0, 0}, 0.4);
  auto v = validate_source(weak, R, bounds);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("moment_min"), std::string::npos);

  const SourceModel strong = SourceModel::make({9, 0, 0, 9, 0, -18}, {0.05, 0, 0}, 0.4);
  v = validate_source(strong, R, bounds);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("moment_max"), std::string::npos);

  const SourceModel close = SourceModel::make({1.2, -0.5, 0.6, 0.8, -0.7, -2.0}, {0.7, 0, 0}, 0.4);
  v = validate_source(close, R, bounds);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("boundary"), std::string::npos);

  // trace removal is reported when the caller's tensor was not trace free
  SourceModel traced = SourceModel::make({2, 0, 0, 2, 0, 2}, {0.05, 0, 0}, 0.4);
  traced.moment = SymMat3{2, 0, 0, 2, 0, 2};  // forge an unprojected tensor
  traced.trace_removed = 2.0;
  v = validate_source(traced, R, bounds);
  bool trace_flagged = false;
  for (const auto& msg : v) trace_flagged = trace_flagged || msg.find("trace") != std::string::npos;
  EXPECT_TRUE(trace_flagged);
}
