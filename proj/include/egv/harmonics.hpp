#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "egv/geometry.hpp"
#include "egv/gravity.hpp"
#include "egv/polynomial.hpp"

namespace egv {

struct HarmonicPoly {
  std::string id;
  Poly3 poly;
};

namespace hp {
inline HarmonicPoly make(const std::string& id,
                         std::initializer_list<std::tuple<double, int, int, int>> terms) {
  HarmonicPoly h;
  h.id = id;
  for (const auto& [c, a, b, cc] : terms) h.poly.at(a, b, cc) += c;
  return h;
}
}  // namespace hp

// Five harmonic quadratics; their Hessians span the trace-free symmetric tensors.
inline const std::vector<HarmonicPoly>& quadratic_basis() {
  static const std::vector<HarmonicPoly> basis = {
      hp::make("x1x2", {{1, 1, 1, 0}}),
      hp::make("x1x3", {{1, 1, 0, 1}}),
      hp::make("x2x3", {{1, 0, 1, 1}}),
      hp::make("(x1^2-x2^2)/2", {{0.5, 2, 0, 0}, {-0.5, 0, 2, 0}}),
      hp::make("(x1^2-x3^2)/2", {{0.5, 2, 0, 0}, {-0.5, 0, 0, 2}}),
  };
  return basis;
}

// Seven harmonic cubics; their Hessians are linear in x and expose the source
// position once the moment tensor is known.
inline const std::vector<HarmonicPoly>& cubic_basis() {
  static const std::vector<HarmonicPoly> basis = {
      hp::make("x1^3-3x1x2^2", {{1, 3, 0, 0}, {-3, 1, 2, 0}}),
      hp::make("x2^3-3x2x1^2", {{1, 0, 3, 0}, {-3, 2, 1, 0}}),
      hp::make("x1^3-3x1x3^2", {{1, 3, 0, 0}, {-3, 1, 0, 2}}),
      hp::make("x3^3-3x3x1^2", {{1, 0, 0, 3}, {-3, 2, 0, 1}}),
      hp::make("x2^3-3x2x3^2", {{1, 0, 3, 0}, {-3, 0, 1, 2}}),
      hp::make("x3^3-3x3x2^2", {{1, 0, 0, 3}, {-3, 0, 2, 1}}),
      hp::make("x1x2x3", {{1, 1, 1, 1}}),
  };
  return basis;
}

inline std::vector<HarmonicPoly> test_basis() {
  std::vector<HarmonicPoly> all = quadratic_basis();
  const auto& c = cubic_basis();
  all.insert(all.end(), c.begin(), c.end());
  return all;
}

// Green pairing of boundary data with a harmonic polynomial:
//   z = oint [ dS/dn * phi - S * dphi/dn ].
// For the potential of a dipole cloud inside the sphere this equals
// rho0 * int u . grad(phi) identically; only the surface quadrature enters.
inline double boundary_z(const SurfaceSamples& samples, const SphereQuadrature& quad,
                         const HarmonicPoly& phi) {
  if (samples.S.size() != quad.nodes.size() || samples.dS_dn.size() != quad.nodes.size())
    throw std::invalid_argument("boundary_z: samples do not match the quadrature nodes");
  const int m = int(quad.nodes.size());
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vec3& x = quad.nodes[i];
    const Vec3 nrm = x / quad.radius;
    const double phi_v = phi.poly.eval(x);
    const double phi_n = phi.poly.gradient(x).dot(nrm);
    z += quad.weights[i] * (samples.dS_dn[i] * phi_v - samples.S[i] * phi_n);
  }
  return z;
}

// --- exterior multipole continuation ------------------------------------

// Real solid harmonics R_lm as explicit polynomial tables, l = 0..4.
// The exterior basis functions are R_lm(y) / |y|^(2l+1).
inline const std::vector<std::pair<int, Poly3>>& solid_harmonics() {
  static const std::vector<std::pair<int, Poly3>> table = [] {
    std::vector<std::pair<int, Poly3>> t;
    auto add = [&t](int l, std::initializer_list<std::tuple<double, int, int, int>> terms) {
      Poly3 p;
      for (const auto& [c, a, b, cc] : terms) p.at(a, b, cc) += c;
      t.emplace_back(l, p);
    };
    add(0, {{1, 0, 0, 0}});
    add(1, {{1, 1, 0, 0}});
    add(1, {{1, 0, 1, 0}});
    add(1, {{1, 0, 0, 1}});
    add(2, {{1, 1, 1, 0}});
    add(2, {{1, 1, 0, 1}});
    add(2, {{1, 0, 1, 1}});
    add(2, {{1, 2, 0, 0}, {-1, 0, 2, 0}});
    add(2, {{2, 0, 0, 2}, {-1, 2, 0, 0}, {-1, 0, 2, 0}});
    add(3, {{2, 0, 0, 3}, {-3, 2, 0, 1}, {-3, 0, 2, 1}});
    add(3, {{4, 1, 0, 2}, {-1, 3, 0, 0}, {-1, 1, 2, 0}});
    add(3, {{4, 0, 1, 2}, {-1, 0, 3, 0}, {-1, 2, 1, 0}});
    add(3, {{1, 2, 0, 1}, {-1, 0, 2, 1}});
    add(3, {{1, 1, 1, 1}});
    add(3, {{1, 3, 0, 0}, {-3, 1, 2, 0}});
    add(3, {{3, 2, 1, 0}, {-1, 0, 3, 0}});
    add(4, {{8, 0, 0, 4}, {-24, 2, 0, 2}, {-24, 0, 2, 2}, {3, 4, 0, 0}, {6, 2, 2, 0}, {3, 0, 4, 0}});
    add(4, {{4, 1, 0, 3}, {-3, 3, 0, 1}, {-3, 1, 2, 1}});
    add(4, {{4, 0, 1, 3}, {-3, 0, 3, 1}, {-3, 2, 1, 1}});
    add(4, {{6, 2, 0, 2}, {-6, 0, 2, 2}, {-1, 4, 0, 0}, {1, 0, 4, 0}});
    add(4, {{6, 1, 1, 2}, {-1, 3, 1, 0}, {-1, 1, 3, 0}});
    add(4, {{1, 3, 0, 1}, {-3, 1, 2, 1}});
    add(4, {{3, 2, 1, 1}, {-1, 0, 3, 1}});
    add(4, {{1, 4, 0, 0}, {-6, 2, 2, 0}, {1, 0, 4, 0}});
    add(4, {{1, 3, 1, 0}, {-1, 1, 3, 0}});
    return t;
  }();
  return table;
}

struct MultipoleExpansion {
  Vec3 center;
  int lmax = 4;
  std::vector<double> coeff;      // aligned with solid_harmonics() up to lmax
  double conv_radius = 0.0;       // evaluation valid for |x - center| > this
  double fit_residual = 0.0;      // relative LS residual of the fit
  double condition = 0.0;         // singular value ratio of the fit matrix
};

namespace detail {
inline int coeff_count(int lmax) {
  int c = 0;
  for (const auto& [l, p] : solid_harmonics())
    if (l <= lmax) ++c;
  return c;
}

inline Vec3 exterior_gradient(const Poly3& R, int l, const Vec3& y) {
  const double r2 = y.norm2();
  const double r = std::sqrt(r2);
  const double powm = std::pow(r, -(2.0 * l + 1.0));
  const Vec3 gR = R.gradient(y);
  const double Rv = R.eval(y);
  return gR * powm - y * ((2.0 * l + 1.0) * Rv * powm / r2);
}

inline double exterior_value(const Poly3& R, int l, const Vec3& y) {
  const double r = y.norm();
  return R.eval(y) * std::pow(r, -(2.0 * l + 1.0));
}
}  // namespace detail

// Least-squares continuation of measured gradients to an exterior expansion
// about `center`. Needs a comfortable oversampling of scalar equations.
inline MultipoleExpansion multipole_fit(const std::vector<Vec3>& points,
                                        const std::vector<Vec3>& gradients,
                                        const Vec3& center, int lmax,
                                        double conv_radius) {
  if (lmax < 0 || lmax > 4) throw std::invalid_argument("multipole_fit: lmax must be 0..4");
  if (points.size() != gradients.size())
    throw std::invalid_argument("multipole_fit: points/gradients size mismatch");
  const int nc = detail::coeff_count(lmax);
  const int rows = int(points.size()) * 3;
  if (rows < 3 * nc)
    throw std::invalid_argument("multipole_fit: need at least 3x more scalar samples than coefficients");

  Eigen::MatrixXd A(rows, nc);
  Eigen::VectorXd b(rows);
  const auto& tab = solid_harmonics();
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vec3 y = points[p] - center;
    int c = 0;
    for (const auto& [l, R] : tab) {
      if (l > lmax) continue;
      const Vec3 g = detail::exterior_gradient(R, l, y);
      A(3 * p + 0, c) = g.x;
      A(3 * p + 1, c) = g.y;
      A(3 * p + 2, c) = g.z;
      ++c;
    }
    b(3 * p + 0) = gradients[p].x;
    b(3 * p + 1) = gradients[p].y;
    b(3 * p + 2) = gradients[p].z;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(nc - 1);
  if (!(smin > 1e-14 * smax)) {
    throw std::runtime_error("multipole_fit: rank-deficient system, condition " +
                             std::to_string(smax / std::max(smin, 1e-300)));
  }
  const Eigen::VectorXd x = svd.solve(b);

  MultipoleExpansion ex;
  ex.center = center;
  ex.lmax = lmax;
  ex.coeff.assign(x.data(), x.data() + nc);
  ex.conv_radius = conv_radius;
  const double bn = b.norm();
  ex.fit_residual = bn > 0.0 ? (A * x - b).norm() / bn : 0.0;
  ex.condition = smax / smin;
  return ex;
}

inline double multipole_eval_potential(const MultipoleExpansion& ex, const Vec3& x) {
  const Vec3 y = x - ex.center;
  if (!(y.norm() > ex.conv_radius))
    throw std::invalid_argument("multipole evaluation inside the convergence radius");
  double s = 0.0;
  int c = 0;
  for (const auto& [l, R] : solid_harmonics()) {
    if (l > ex.lmax) continue;
    s += ex.coeff[c] * detail::exterior_value(R, l, y);
    ++c;
  }
  return s;
}

inline Vec3 multipole_eval_gradient(const MultipoleExpansion& ex, const Vec3& x) {
  const Vec3 y = x - ex.center;
  if (!(y.norm() > ex.conv_radius))
    throw std::invalid_argument("multipole evaluation inside the convergence radius");
  Vec3 g{0, 0, 0};
  int c = 0;
  for (const auto& [l, R] : solid_harmonics()) {
    if (l > ex.lmax) continue;
    g += detail::exterior_gradient(R, l, y) * ex.coeff[c];
    ++c;
  }
  return g;
}

// Surface data reconstructed from an expansion, for feeding the same pairing
// used with directly computed samples.
inline SurfaceSamples multipole_surface_samples(const MultipoleExpansion& ex,
                                                const SphereQuadrature& quad, double t) {
  SurfaceSamples out;
  out.t = t;
  out.S.resize(quad.nodes.size());
  out.dS_dn.resize(quad.nodes.size());
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const Vec3& x = quad.nodes[i];
    out.S[i] = multipole_eval_potential(ex, x);
    out.dS_dn[i] = multipole_eval_gradient(ex, x).dot(x / quad.radius);
  }
  return out;
}

}  // namespace egv
