#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "egv/elastic.hpp"
#include "egv/field.hpp"
#include "egv/geometry.hpp"
#include "egv/gravity.hpp"
#include "egv/harmonics.hpp"
#include "egv/source.hpp"

namespace egv {

// G(phi) recovered from the boundary pairing at the inversion time t1.
// The pairing grows as z(t) = G t^2/2 while the boundary stays quiet.
inline double moment_from_surface(double z, double t1) {
  if (!(t1 > 0.0)) throw std::invalid_argument("t1 must be positive");
  return 2.0 * z / (t1 * t1);
}

// z and G for the full 12-polynomial test family, in test_basis() order.
struct MomentFunctionals {
  double t1 = 0.0;
  std::vector<std::string> ids;
  std::vector<double> z;
  std::vector<double> g;

  double g_at(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) return g[i];
    throw std::invalid_argument("no functional named " + id);
  }
};

inline MomentFunctionals functionals_from_samples(const SurfaceSamples& samples,
                                                  const SphereQuadrature& quad,
                                                  double t1) {
  MomentFunctionals f;
  f.t1 = t1;
  for (const auto& phi : test_basis()) {
    const double zv = boundary_z(samples, quad, phi);
    f.ids.push_back(phi.id);
    f.z.push_back(zv);
    f.g.push_back(moment_from_surface(zv, t1));
  }
  return f;
}

// Exact value M : Hess(phi)(P); the identity the whole chain rests on.
inline double moment_functional_closed_form(const SourceModel& src,
                                            const HarmonicPoly& phi) {
  if (phi.poly.degree() > 3)
    throw std::invalid_argument("closed form only valid for degree <= 3");
  return src.moment.contract(phi.poly.hessian(src.center));
}

// Moment tensor from the five quadratic functionals. Exactly determined:
// off-diagonals from the mixed monomials, the diagonal from the two
// difference functionals plus zero trace.
inline SymMat3 recover_moment(const MomentFunctionals& f) {
  const double g12 = f.g_at("x1x2");
  const double g13 = f.g_at("x1x3");
  const double g23 = f.g_at("x2x3");
  const double a = f.g_at("(x1^2-x2^2)/2");  // M11 - M22
  const double b = f.g_at("(x1^2-x3^2)/2");  // M11 - M33
  SymMat3 m;
  m.m12 = 0.5 * g12;
  m.m13 = 0.5 * g13;
  m.m23 = 0.5 * g23;
  m.m11 = (a + b) / 3.0;
  m.m22 = m.m11 - a;
  m.m33 = m.m11 - b;
  return m;
}

// Row k: coefficients of x in M : Hess(phi_k)(x) for the cubic family, so
// A p = b with b the measured cubic functionals (their Hessians are linear).
struct LocationSystem {
  Eigen::Matrix<double, Eigen::Dynamic, 3> A;
  Eigen::VectorXd b;
};

inline LocationSystem location_system(const MomentFunctionals& f, const SymMat3& mhat) {
  const auto& cubics = cubic_basis();
  LocationSystem sys;
  sys.A.resize(int(cubics.size()), 3);
  sys.b.resize(int(cubics.size()));
  for (std::size_t k = 0; k < cubics.size(); ++k) {
    // M : Hess(phi) as a polynomial in x (linear for cubic phi).
    Poly3 contracted;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const Poly3 dij = cubics[k].poly.differentiate(i).differentiate(j);
        for (int c = 0; c < Poly3::kTerms; ++c)
          contracted.coeff(c) += mhat(i, j) * dij.coeff(c);
      }
    sys.A(int(k), 0) = contracted.at(1, 0, 0);
    sys.A(int(k), 1) = contracted.at(0, 1, 0);
    sys.A(int(k), 2) = contracted.at(0, 0, 1);
    sys.b(int(k)) = f.g_at(cubics[k].id) - contracted.at(0, 0, 0);
  }
  return sys;
}

struct LocationSolve {
  Vec3 location;
  double sigma_min;
  double residual;  // relative LS residual
};

inline LocationSolve recover_location(const MomentFunctionals& f, const SymMat3& mhat,
                                      const SourceBounds& bounds) {
  const double fro = mhat.frobenius();
  if (!(fro >= 0.5 * bounds.moment_min))
    throw std::invalid_argument(
        "recover_location: |M| below moment_min/2, the location system is not trustworthy");
  LocationSystem sys = location_system(f, mhat);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()(2);
  if (!(smin >= 1e-8 * fro))
    throw std::runtime_error(
        "recover_location: location system ill-conditioned (sigma_min " +
        std::to_string(smin) + "); |M| may violate the moment_min bound");
  const Eigen::Vector3d p = svd.solve(sys.b);
  const double bn = sys.b.norm();
  const double res = bn > 0.0 ? (sys.A * p - sys.b).norm() / bn : 0.0;
  return {{p(0), p(1), p(2)}, smin, res};
}

struct ReconstructionResult {
  SymMat3 moment;
  Vec3 location;
  double sigma_min = 0.0;
  double res_moment = 0.0;  // data-side fit residual (multipole route), 0 for ideal data
  double res_loc = 0.0;
  bool no_source = false;
  MomentFunctionals functionals;
};

inline ReconstructionResult reconstruct_from_samples(const SurfaceSamples& samples,
                                                     const SphereQuadrature& quad,
                                                     double t1,
                                                     const SourceBounds& bounds,
                                                     double res_moment = 0.0) {
  ReconstructionResult r;
  r.functionals = functionals_from_samples(samples, quad, t1);
  r.moment = recover_moment(r.functionals);
  r.res_moment = res_moment;
  if (r.moment.frobenius() < 1e-10 * bounds.moment_max) {
    r.no_source = true;
    return r;
  }
  const LocationSolve loc = recover_location(r.functionals, r.moment, bounds);
  r.location = loc.location;
  r.sigma_min = loc.sigma_min;
  r.res_loc = loc.residual;
  return r;
}

inline ReconstructionResult reconstruct_from_expansion(const MultipoleExpansion& ex,
                                                       const SphereQuadrature& quad, double t1,
                                                       const SourceBounds& bounds) {
  const SurfaceSamples samples = multipole_surface_samples(ex, quad, t1);
  return reconstruct_from_samples(samples, quad, t1, bounds, ex.fit_residual);
}

// Measured route: continue the ball-sampled gradients to the boundary sphere
// through an exterior expansion, then run the same surface inversion.
inline ReconstructionResult reconstruct_from_trace(const GravityTrace& trace, double t1,
                                                   const SphereQuadrature& quad,
                                                   int lmax, double conv_radius,
                                                   const SourceBounds& bounds) {
  const auto& g_t1 = trace.at_time(t1);  // throws, naming the time
  const MultipoleExpansion ex =
      multipole_fit(trace.points, g_t1, Vec3{0, 0, 0}, lmax, conv_radius);
  return reconstruct_from_expansion(ex, quad, t1, bounds);
}

// --- empirical stability sweep -------------------------------------------

struct SweepRow {
  std::string direction;  // "moment" or "location"
  double delta;           // parameter step along the unit direction
  double eps;             // trace distance between the two forward runs
  double dm;              // |M1^ - M2^|_F between the reconstructions
  double dp;              // |P1^ - P2^|
  double d_truth;         // |dM|_F + |dP| between the true sources
  double d_recon;         // dm + dp
  double ratio_truth;     // d_truth / eps
  double ratio_recon;     // d_recon / eps
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double measured_c = 0.0;  // max reconstruction ratio over all rows
};

struct SweepSetup {
  Grid grid;
  ElasticMedium medium;
  SourceModel base;
  ObservationSpec obs;
  SphereQuadrature quad;
  SourceBounds bounds;
  double t_end;
  double t1;
  double cfl = 0.5;
  int sample_count = 20;
  int lmax = 4;
  std::vector<double> deltas = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  // perturbation directions: unit Frobenius trace-free, resp. unit length
  SymMat3 dir_moment{1.0 / std::sqrt(6.0), 0, 0, 1.0 / std::sqrt(6.0), 0, -2.0 / std::sqrt(6.0)};
  Vec3 dir_location{0.6, 0.64, 0.48};
};

inline SweepResult stability_sweep(const SweepSetup& s) {
  SimulateOptions opt;
  opt.cfl = s.cfl;
  opt.sample_count = s.sample_count;
  const double conv = s.grid.radius * 0.99;

  auto run = [&](const SourceModel& src) {
    const Trajectory traj = simulate(s.grid, s.medium, src, s.t_end, opt);
    return compute_trace(traj, s.medium, s.obs);
  };
  auto recon = [&](const GravityTrace& tr) {
    return reconstruct_from_trace(tr, s.t1, s.quad, s.lmax, conv, s.bounds);
  };

  const GravityTrace base_tr = run(s.base);
  const ReconstructionResult base_rc = recon(base_tr);

  SweepResult out;
  for (int dir = 0; dir < 2; ++dir) {
    for (double delta : s.deltas) {
      SourceModel pert = s.base;
      SweepRow row;
      row.direction = dir == 0 ? "moment" : "location";
      row.delta = delta;
      if (dir == 0) {
        pert = SourceModel::make(s.base.moment + s.dir_moment * delta, s.base.center,
                                 s.base.d0);
      } else {
        pert = SourceModel::make(s.base.moment, s.base.center + s.dir_location * delta,
                                 s.base.d0);
      }
      const GravityTrace tr = run(pert);
      const ReconstructionResult rc = recon(tr);
      row.eps = trace_distance(base_tr, tr, s.obs);
      row.dm = (rc.moment - base_rc.moment).frobenius();
      row.dp = (rc.location - base_rc.location).norm();
      row.d_truth = (pert.moment - s.base.moment).frobenius() +
                    (pert.center - s.base.center).norm();
      row.d_recon = row.dm + row.dp;
      row.ratio_truth = row.d_truth / row.eps;
      row.ratio_recon = row.d_recon / row.eps;
      out.rows.push_back(row);
      out.measured_c = std::max(out.measured_c, row.ratio_recon);
    }
  }
  return out;
}

}  // namespace egv
