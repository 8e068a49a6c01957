#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "egv/field.hpp"
#include "egv/geometry.hpp"
#include "egv/medium.hpp"
#include "egv/observation.hpp"
#include "egv/parallel.hpp"

namespace egv {

// The gravity perturbation induced by a displacement snapshot is the Newtonian
// potential of the dipole density -div(rho0 u chi):
//   S(x) = -(rho0 / 4pi) sum_cells u(y) . (x-y)/|x-y|^3 h^3.
// Summation runs over the snapshot's support only; omitted cells carry u = 0.

inline double potential_at(const SparseSnapshot& snap, const Grid& grid,
                           const ElasticMedium& medium, const Vec3& x) {
  const double h = grid.h();
  const double h3 = h * h * h;
  const double near2 = 0.25 * h * h;
  double s = 0.0;
  for (std::size_t e = 0; e < snap.size(); ++e) {
    const Vec3 d = x - grid.pos(snap.idx[e]);
    const double r2 = d.norm2();
    if (r2 < near2)
      throw std::invalid_argument("potential_at: point lies inside a source-support cell");
    const double r = std::sqrt(r2);
    s += snap.value(e).dot(d) / (r2 * r);
  }
  return -medium.rho0 / (4.0 * std::numbers::pi) * h3 * s;
}

inline Vec3 gradient_at(const SparseSnapshot& snap, const Grid& grid,
                        const ElasticMedium& medium, const Vec3& x) {
  const double h = grid.h();
  const double h3 = h * h * h;
  const double near2 = 0.25 * h * h;
  Vec3 g{0.0, 0.0, 0.0};
  for (std::size_t e = 0; e < snap.size(); ++e) {
    const Vec3 d = x - grid.pos(snap.idx[e]);
    const double r2 = d.norm2();
    if (r2 < near2)
      throw std::invalid_argument("gradient_at: point lies inside a source-support cell");
    const double r = std::sqrt(r2);
    const double ir3 = 1.0 / (r2 * r);
    const double ir5 = ir3 / r2;
    const Vec3 u = snap.value(e);
    // d_j [ (x-y)_i / |x-y|^3 ] = delta_ij/r^3 - 3 (x-y)_i (x-y)_j / r^5
    g += u * ir3 - d * (3.0 * u.dot(d) * ir5);
  }
  return g * (-medium.rho0 / (4.0 * std::numbers::pi) * h3);
}

// Gravity-gradient record: values[t][p] = grad S at observation point p, time t.
struct GravityTrace {
  std::vector<double> times;
  std::vector<Vec3> points;
  std::vector<std::vector<Vec3>> values;

  const std::vector<Vec3>& at_time(double t, double tol = 1e-12) const {
    for (std::size_t i = 0; i < times.size(); ++i)
      if (std::fabs(times[i] - t) <= tol * std::max(1.0, std::fabs(t))) return values[i];
    throw std::invalid_argument("trace has no row at t = " + std::to_string(t));
  }
};

inline GravityTrace compute_trace(const Trajectory& traj, const ElasticMedium& medium,
                                  const ObservationSpec& obs) {
  GravityTrace tr;
  tr.times = obs.times;
  tr.points = obs.points;
  tr.values.resize(obs.times.size());
  for (std::size_t ti = 0; ti < obs.times.size(); ++ti) {
    const SparseSnapshot& snap = traj.at_time(obs.times[ti]);  // throws, naming the time
    auto& row = tr.values[ti];
    row.resize(obs.points.size());
    const int np = int(obs.points.size());
    parallel_planes(np, [&](int p) {
      row[p] = gradient_at(snap, traj.grid, medium, obs.points[p]);
    });
  }
  return tr;
}

// Maximum over times of the discrete L2(ball) distance between two records
// on the same observation geometry.
inline double trace_distance(const GravityTrace& a, const GravityTrace& b,
                             const ObservationSpec& obs) {
  if (a.times.size() != b.times.size() || a.points.size() != b.points.size())
    throw std::invalid_argument("trace_distance: mismatched shapes");
  for (std::size_t i = 0; i < a.times.size(); ++i)
    if (a.times[i] != b.times[i])
      throw std::invalid_argument("trace_distance: mismatched sample times");
  const double cell = obs.ball_volume() / double(obs.points.size());
  double worst = 0.0;
  for (std::size_t ti = 0; ti < a.times.size(); ++ti) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.points.size(); ++p)
      s += (a.values[ti][p] - b.values[ti][p]).norm2();
    worst = std::max(worst, s * cell);
  }
  return std::sqrt(worst);
}

namespace detail {
// Legendre nodes and weights on [-1,1] by Newton iteration.
inline void legendre_rule(int n, std::vector<double>& xg, std::vector<double>& wg) {
  xg.resize(n);
  wg.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    xg[i] = -x;
    xg[n - 1 - i] = x;
    wg[i] = wg[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}
}  // namespace detail

// Gauss-Legendre latitude x uniform longitude quadrature on the sphere |x|=R.
// Exact for spherical polynomials far beyond the degrees carried by the
// early-time signal, so the surface pairings below are quadrature-clean.
struct SphereQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // sum to 4 pi R^2
  double radius;

  static SphereQuadrature gauss_legendre(double R, int n_theta, int n_phi) {
    if (n_theta < 2 || n_phi < 4)
      throw std::invalid_argument("sphere quadrature needs n_theta >= 2, n_phi >= 4");
    SphereQuadrature q;
    q.radius = R;
    std::vector<double> xg, wg;
    detail::legendre_rule(n_theta, xg, wg);
    const double dphi = 2.0 * std::numbers::pi / n_phi;
    q.nodes.reserve(std::size_t(n_theta) * n_phi);
    q.weights.reserve(std::size_t(n_theta) * n_phi);
    for (int i = 0; i < n_theta; ++i) {
      const double ct = xg[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int j = 0; j < n_phi; ++j) {
        const double phi = dphi * j;
        q.nodes.push_back(Vec3{st * std::cos(phi), st * std::sin(phi), ct} * R);
        q.weights.push_back(wg[i] * dphi * R * R);
      }
    }
    return q;
  }

  double area() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

// Potential and normal derivative sampled on a closed surface.
struct SurfaceSamples {
  double t = 0.0;
  std::vector<double> S;
  std::vector<double> dS_dn;
};

inline SurfaceSamples surface_samples(const SparseSnapshot& snap, const Grid& grid,
                                      const ElasticMedium& medium,
                                      const SphereQuadrature& quad) {
  SurfaceSamples out;
  out.t = snap.t;
  out.S.resize(quad.nodes.size());
  out.dS_dn.resize(quad.nodes.size());
  const int m = int(quad.nodes.size());
  parallel_planes(m, [&](int i) {
    const Vec3& x = quad.nodes[i];
    const Vec3 nrm = x / quad.radius;
    out.S[i] = potential_at(snap, grid, medium, x);
    out.dS_dn[i] = gradient_at(snap, grid, medium, x).dot(nrm);
  });
  return out;
}

}  // namespace egv
