#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "egv/harmonics.hpp"

using namespace egv;

TEST(TestBasis, TwelveHarmonicPolynomials) {
  const auto basis = test_basis();
  ASSERT_EQ(basis.size(), 12u);
  EXPECT_EQ(quadratic_basis().size(), 5u);
  EXPECT_EQ(cubic_basis().size(), 7u);
  for (const auto& phi : basis) {
    EXPECT_TRUE(phi.poly.laplacian().is_zero()) << phi.id;
    EXPECT_LE(phi.poly.degree(), 3) << phi.id;
  }
  // quadratics first, cubics after
  EXPECT_EQ(basis[0].id, "x1x2");
  EXPECT_EQ(basis[5].id, cubic_basis()[0].id);
}

TEST(QuadraticBasis, HessiansSpanTraceFreeTensors) {
  const auto& basis = quadratic_basis();
  Eigen::MatrixXd gram(5, 5);
  for (int a = 0; a < 5; ++a) {
    const SymMat3 ha = basis[a].poly.hessian({0, 0, 0});
    EXPECT_NEAR(ha.trace(), 0.0, 1e-15);
    // degree-two polynomials have constant Hessians
    const SymMat3 hx = basis[a].poly.hessian({0.3, -0.8, 1.1});
    EXPECT_DOUBLE_EQ(ha.m11, hx.m11);
    EXPECT_DOUBLE_EQ(ha.m23, hx.m23);
    for (int b = 0; b < 5; ++b)
      gram(a, b) = ha.contract(basis[b].poly.hessian({0, 0, 0}));
  }
  // five independent directions in the five dimensional trace-free space
  EXPECT_GT(std::fabs(gram.determinant()), 1.0);
}

TEST(SolidHarmonics, TableIsHarmonicAndComplete) {
  const auto& tab = solid_harmonics();
  ASSERT_EQ(tab.size(), 25u);
  int count[5] = {0, 0, 0, 0, 0};
  for (const auto& [l, poly] : tab) {
    ASSERT_GE(l, 0);
    ASSERT_LE(l, 4);
    ++count[l];
    EXPECT_TRUE(poly.laplacian().is_zero());
    EXPECT_EQ(poly.degree(), l);
  }
  for (int l = 0; l <= 4; ++l) EXPECT_EQ(count[l], 2 * l + 1);
}

TEST(BoundaryZ, EqualsVolumePairingForDipoleClouds) {
  // the Green pairing of the cloud potential with a harmonic phi reduces to
  // rho0 * sum u . grad(phi) exactly; quadrature is the only error source
  const Grid g(20, 1.2, 1.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SparseSnapshot cloud;
  while (cloud.size() < 50) {
    const int i = int((unit(rng) * 0.5 + 0.5) * g.nodes());
    const int j = int((unit(rng) * 0.5 + 0.5) * g.nodes());
    const int k = int((unit(rng) * 0.5 + 0.5) * g.nodes());
    if (i >= g.nodes() || j >= g.nodes() || k >= g.nodes()) continue;
    if (g.pos(i, j, k).norm() > 0.5) continue;
    cloud.idx.push_back(uint32_t(g.index(i, j, k)));
    cloud.ux.push_back(unit(rng));
    cloud.uy.push_back(unit(rng));
    cloud.uz.push_back(unit(rng));
  }
  const SphereQuadrature quad = SphereQuadrature::gauss_legendre(1.0, 36, 72);
  const double h3 = g.h() * g.h() * g.h();
  for (double rho0 : {1.0, 2.0}) {
    const ElasticMedium medium(2.0, 1.0, rho0);
    const SurfaceSamples samples = surface_samples(cloud, g, medium, quad);
    for (const auto& phi : test_basis()) {
      double volume = 0.0;
      for (std::size_t e = 0; e < cloud.size(); ++e)
        volume += cloud.value(e).dot(phi.poly.gradient(g.pos(cloud.idx[e])));
      volume *= rho0 * h3;
      const double zb = boundary_z(samples, quad, phi);
      EXPECT_NEAR(zb, volume, 1e-10 * std::max(std::fabs(volume), 1e-3)) << phi.id;
    }
  }
}

TEST(BoundaryZ, RejectsMismatchedSamples) {
  const SphereQuadrature quad = SphereQuadrature::gauss_legendre(1.0, 8, 16);
  SurfaceSamples s;
  s.S.resize(10);
  s.dS_dn.resize(10);
  EXPECT_THROW(boundary_z(s, quad, test_basis()[0]), std::invalid_argument);
}

TEST(ExteriorBasis, GradientMatchesFiniteDifferences) {
  const auto& tab = solid_harmonics();
  const Vec3 y{0.9, -1.3, 0.7};
  const double d = 1e-6;
  for (const auto& [l, R] : tab) {
    const Vec3 grad = detail::exterior_gradient(R, l, y);
    for (int c = 0; c < 3; ++c) {
      Vec3 yp = y, ym = y;
      yp[c] += d;
      ym[c] -= d;
      const double fd =
          (detail::exterior_value(R, l, yp) - detail::exterior_value(R, l, ym)) / (2 * d);
      EXPECT_NEAR(grad[c], fd, 1e-6 * std::max(1.0, std::fabs(fd)));
    }
  }
}

TEST(ExteriorBasis, FunctionsAreHarmonicOffTheOrigin) {
  // undivided 7-point Laplacian of R_lm / r^(2l+1) at a generic point
  const auto& tab = solid_harmonics();
  const Vec3 y{1.1, 0.6, -0.9};
  const double d = 0.01;
  for (const auto& [l, R] : tab) {
    double sum = -6.0 * detail::exterior_value(R, l, y);
    double scale = std::fabs(detail::exterior_value(R, l, y));
    for (int c = 0; c < 3; ++c) {
      Vec3 yp = y, ym = y;
      yp[c] += d;
      ym[c] -= d;
      sum += detail::exterior_value(R, l, yp) + detail::exterior_value(R, l, ym);
      scale = std::max({scale, std::fabs(detail::exterior_value(R, l, yp))});
    }
    EXPECT_LE(std::fabs(sum), 1e-5 * std::max(scale, 1e-12)) << "l = " << l;
  }
}

namespace {

MultipoleExpansion known_expansion() {
  MultipoleExpansion ex;
  ex.center = {0, 0, 0};
  ex.lmax = 4;
  ex.coeff.assign(25, 0.0);
  // quadrupole heavy with a touch of l = 3, like an early-time record
  ex.coeff[4] = 0.8;
  ex.coeff[6] = -0.5;
  ex.coeff[7] = 0.3;
  ex.coeff[11] = 0.05;
  ex.conv_radius = 0.99;
  return ex;
}

}  // namespace

TEST(MultipoleFit, RecoversKnownCoefficients) {
  const MultipoleExpansion truth = known_expansion();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Vec3> points;
  std::vector<Vec3> grads;
  while (points.size() < 150) {
    const Vec3 c{unit(rng), unit(rng), unit(rng)};
    if (c.norm2() > 1.0) continue;
    const Vec3 p = Vec3{1.5, 0, 0} + c * 0.25;
    points.push_back(p);
    grads.push_back(multipole_eval_gradient(truth, p));
  }
  const MultipoleExpansion fit = multipole_fit(points, grads, {0, 0, 0}, 4, 0.99);
  ASSERT_EQ(fit.coeff.size(), 25u);
  for (int c = 0; c < 25; ++c)
    EXPECT_NEAR(fit.coeff[c], truth.coeff[c], 1e-9) << "coeff " << c;
  EXPECT_LE(fit.fit_residual, 1e-10);
  EXPECT_GT(fit.condition, 1.0);

  // continued field matches on the body sphere
  const Vec3 probe{0.0, 0.98, 0.21};
  EXPECT_NEAR(multipole_eval_potential(fit, probe), multipole_eval_potential(truth, probe),
              1e-9);
  const Vec3 gf = multipole_eval_gradient(fit, probe);
  const Vec3 gt = multipole_eval_gradient(truth, probe);
  EXPECT_NEAR((gf - gt).norm(), 0.0, 1e-8);
}

TEST(MultipoleFit, InputValidation) {
  std::vector<Vec3> pts(30, Vec3{1.5, 0, 0});
  std::vector<Vec3> grads(30, Vec3{0, 0, 1});
  EXPECT_THROW(multipole_fit(pts, grads, {0, 0, 0}, 5, 0.9), std::invalid_argument);
  EXPECT_THROW(multipole_fit(pts, grads, {0, 0, 0}, -1, 0.9), std::invalid_argument);
  std::vector<Vec3> short_grads(29);
  EXPECT_THROW(multipole_fit(pts, short_grads, {0, 0, 0}, 4, 0.9), std::invalid_argument);
  std::vector<Vec3> few(20, Vec3{1.5, 0, 0});
  std::vector<Vec3> few_g(20);
  EXPECT_THROW(multipole_fit(few, few_g, {0, 0, 0}, 4, 0.9), std::invalid_argument);
  // 30 copies of one point cannot pin 25 coefficients
  EXPECT_THROW(multipole_fit(pts, grads, {0, 0, 0}, 4, 0.9), std::runtime_error);
}

TEST(MultipoleEval, GuardsTheConvergenceRadius) {
  const MultipoleExpansion ex = known_expansion();
  EXPECT_THROW(multipole_eval_potential(ex, {0.5, 0, 0}), std::invalid_argument);
  EXPECT_THROW(multipole_eval_gradient(ex, {0.0, 0.9, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(multipole_eval_potential(ex, {1.0, 0, 0}));
}

TEST(MultipoleSurfaceSamples, EvaluateOnTheQuadratureNodes) {
  const MultipoleExpansion ex = known_expansion();
  const SphereQuadrature quad = SphereQuadrature::gauss_legendre(1.0, 8, 16);
  const SurfaceSamples s = multipole_surface_samples(ex, quad, 0.25);
  EXPECT_DOUBLE_EQ(s.t, 0.25);
  ASSERT_EQ(s.S.size(), quad.nodes.size());
  for (std::size_t i = 0; i < quad.nodes.size(); i += 31) {
    EXPECT_DOUBLE_EQ(s.S[i], multipole_eval_potential(ex, quad.nodes[i]));
    EXPECT_DOUBLE_EQ(s.dS_dn[i],
                     multipole_eval_gradient(ex, quad.nodes[i]).dot(quad.nodes[i] / quad.radius));
  }
}
