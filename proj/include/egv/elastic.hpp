#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "egv/field.hpp"
#include "egv/geometry.hpp"
#include "egv/medium.hpp"
#include "egv/parallel.hpp"
#include "egv/source.hpp"

namespace egv {

// Largest stable step for the collocated second-order scheme in 3D.
inline double stable_dt(const Grid& grid, const ElasticMedium& medium, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must be in (0, 1]");
  return cfl * grid.h() / (std::sqrt(3.0) * medium.cp());
}

// Explicit displacement-velocity integrator for
//   rho0 u_tt = (lambda0+mu0) grad(div u) + mu0 lap(u) + f
// on the node grid, zero displacement clamped on the outer cube faces.
// Velocity-Verlet with a cached acceleration: one stencil pass per step.
class ElasticSolver {
 public:
  ElasticSolver(const Grid& grid, const ElasticMedium& medium, double dt)
      : grid_(grid), medium_(medium), dt_(dt), state_(grid), force_(grid), accel_(grid) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  }

  void set_force(const SourceModel& src) {
    const int N = grid_.nodes();
    force_scale_ = 0.0;
    for (int c = 0; c < 3; ++c) {
      double* fc = force_.comp(c);
      parallel_planes(N, [&](int k) {
        for (int j = 0; j < N; ++j)
          for (int i = 0; i < N; ++i) {
            const Vec3 f = source_field(src, grid_.pos(i, j, k));
            fc[grid_.index(i, j, k)] = f[c];
          }
      });
    }
    for (std::size_t lin = 0; lin < grid_.node_count(); ++lin)
      force_scale_ = std::max(force_scale_, force_.at(lin).norm());
    refresh_accel();
  }

  void set_initial_velocity(const VectorField& v0) {
    state_.v = v0;
    refresh_accel();
  }

  const WaveState& state() const { return state_; }
  const VectorField& force() const { return force_; }
  double dt() const { return dt_; }

  void step() {
    const std::size_t total = grid_.node_count();
    const double half = 0.5 * dt_;
    for (int c = 0; c < 3; ++c) {
      double* v = state_.v.comp(c);
      double* u = state_.u.comp(c);
      const double* a = accel_.comp(c);
      for (std::size_t l = 0; l < total; ++l) {
        v[l] += half * a[l];
        u[l] += dt_ * v[l];
      }
    }
    refresh_accel();
    for (int c = 0; c < 3; ++c) {
      double* v = state_.v.comp(c);
      const double* a = accel_.comp(c);
      for (std::size_t l = 0; l < total; ++l) v[l] += half * a[l];
    }
    state_.t += dt_;
    ++steps_taken_;
    check_stability();
  }

  double max_displacement() const {
    double m = 0.0;
    for (std::size_t l = 0; l < grid_.node_count(); ++l)
      m = std::max(m, state_.u.at(l).norm2());
    return std::sqrt(m);
  }

  // Kinetic plus strain energy of the current state (interior differences).
  double discrete_energy() const {
    const int N = grid_.nodes();
    const double h = grid_.h();
    const double inv2h = 1.0 / (2.0 * h);
    const double* uc[3] = {state_.u.comp(0), state_.u.comp(1), state_.u.comp(2)};
    const std::size_t sx = 1, sy = N, sz = std::size_t(N) * N;
    const std::size_t stride[3] = {sx, sy, sz};
    double strain = plane_sum(N - 2, [&](int kk) {
      const int k = kk + 1;
      double acc = 0.0;
      for (int j = 1; j < N - 1; ++j)
        for (int i = 1; i < N - 1; ++i) {
          const std::size_t l = grid_.index(i, j, k);
          double g[3][3];
          for (int c = 0; c < 3; ++c)
            for (int d = 0; d < 3; ++d)
              g[c][d] = (uc[c][l + stride[d]] - uc[c][l - stride[d]]) * inv2h;
          const double div = g[0][0] + g[1][1] + g[2][2];
          double eps2 = 0.0;
          for (int c = 0; c < 3; ++c)
            for (int d = 0; d < 3; ++d) {
              const double e = 0.5 * (g[c][d] + g[d][c]);
              eps2 += e * e;
            }
          acc += 0.5 * medium_.lambda0 * div * div + medium_.mu0 * eps2;
        }
      return acc;
    });
    double kinetic = 0.0;
    for (std::size_t l = 0; l < grid_.node_count(); ++l)
      kinetic += 0.5 * medium_.rho0 * state_.v.at(l).norm2();
    return (strain + kinetic) * h * h * h;
  }

 private:
  void refresh_accel() {
    const int N = grid_.nodes();
    const double h = grid_.h();
    const double ih2 = 1.0 / (h * h);
    const double i4h2 = 0.25 * ih2;
    const double lm = medium_.lambda0 + medium_.mu0;
    const double mu = medium_.mu0;
    const double irho = 1.0 / medium_.rho0;
    const std::size_t sx = 1, sy = N, sz = std::size_t(N) * N;
    const std::size_t stride[3] = {sx, sy, sz};
    const double* u[3] = {state_.u.comp(0), state_.u.comp(1), state_.u.comp(2)};
    const double* f[3] = {force_.comp(0), force_.comp(1), force_.comp(2)};
    double* a[3] = {accel_.comp(0), accel_.comp(1), accel_.comp(2)};

    parallel_planes(N, [&](int k) {
      const bool zedge = (k == 0 || k == N - 1);
      for (int j = 0; j < N; ++j) {
        const bool yedge = (j == 0 || j == N - 1);
        for (int i = 0; i < N; ++i) {
          const std::size_t l = grid_.index(i, j, k);
          if (zedge || yedge || i == 0 || i == N - 1) {
            a[0][l] = a[1][l] = a[2][l] = 0.0;  // clamped faces
            continue;
          }
          for (int c = 0; c < 3; ++c) {
            const double* w = u[c];
            const double lap = (w[l + sx] + w[l - sx] + w[l + sy] + w[l - sy] +
                                w[l + sz] + w[l - sz] - 6.0 * w[l]) * ih2;
            // grad(div u) component c: d2_cc u_c plus the mixed terms.
            double gd = (w[l + stride[c]] + w[l - stride[c]] - 2.0 * w[l]) * ih2;
            for (int d = 0; d < 3; ++d) {
              if (d == c) continue;
              const double* wd = u[d];
              gd += (wd[l + stride[c] + stride[d]] - wd[l + stride[c] - stride[d]] -
                     wd[l - stride[c] + stride[d]] + wd[l - stride[c] - stride[d]]) * i4h2;
            }
            a[c][l] = (lm * gd + mu * lap + f[c][l]) * irho;
          }
        }
      }
    });
  }

  void check_stability() {
    const double m = max_displacement();
    const double t = state_.t;
    const double ballistic = force_scale_ * t * t / (2.0 * medium_.rho0);
    if (!std::isfinite(m) || (ballistic > 0.0 && m > 1e6 * ballistic))
      throw std::runtime_error(
          "elastic solver unstable: max|u| = " + std::to_string(m) + " at step " +
          std::to_string(steps_taken_) + " (ballistic scale " + std::to_string(ballistic) + ")");
  }

  Grid grid_;
  ElasticMedium medium_;
  double dt_;
  WaveState state_;
  VectorField force_;
  VectorField accel_;
  double force_scale_ = 0.0;
  long steps_taken_ = 0;
};

struct SimulateOptions {
  double cfl = 0.5;
  int sample_count = 20;  // snapshots at k*t_end/sample_count, k = 0..sample_count
  double snapshot_floor = 1e-100;  // relative cut applied when sparsifying
  std::function<void(const WaveState&, int)> on_sample;  // full-state hook
};

// Forward solve up to t_end with zero initial data. Refuses windows that
// violate the early-time hypothesis the inversion rests on.
inline Trajectory simulate(const Grid& grid, const ElasticMedium& medium,
                           const SourceModel& src, double t_end,
                           const SimulateOptions& opt = {}) {
  const double quiet = boundary_quiet_time(src, medium);
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (t_end >= quiet)
    throw std::invalid_argument(
        "t_end >= quiet time " + std::to_string(quiet) +
        " = cone_slope*d0/2; the boundary would no longer be silent");
  if (opt.sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");

  const double dt_cap = stable_dt(grid, medium, opt.cfl);
  const double sample_dt = t_end / opt.sample_count;
  const int per_sample = std::max(1, int(std::ceil(sample_dt / dt_cap - 1e-12)));
  const double dt = sample_dt / per_sample;

  ElasticSolver solver(grid, medium, dt);
  solver.set_force(src);

  Trajectory traj(grid);
  traj.dt = dt;
  traj.snapshots.push_back(sparsify(solver.state().u, 0.0, opt.snapshot_floor));
  if (opt.on_sample) opt.on_sample(solver.state(), 0);

  for (int s = 1; s <= opt.sample_count; ++s) {
    for (int m = 0; m < per_sample; ++m) {
      solver.step();
      traj.steps.push_back(
          {solver.state().t, solver.max_displacement(), solver.discrete_energy()});
    }
    SparseSnapshot snap = sparsify(solver.state().u, s * sample_dt, opt.snapshot_floor);
    traj.snapshots.push_back(std::move(snap));
    if (opt.on_sample) opt.on_sample(solver.state(), s);
  }
  return traj;
}

struct EnergyRow {
  double t;
  double max_u;
  double lhs;  // int_domain |u(.,t)|^2
  double rhs;  // t^3 exp(t/rho0)/rho0 * int_domain |f|^2
  bool ok;
};

// Checks the a-priori L2 bound at every stored snapshot.
inline std::vector<EnergyRow> energy_report(const Trajectory& traj,
                                            const ElasticMedium& medium,
                                            const SourceModel& src) {
  const Grid& g = traj.grid;
  const double h3 = g.h() * g.h() * g.h();
  double f2 = 0.0;
  const int N = g.nodes();
  f2 = plane_sum(N, [&](int k) {
    double acc = 0.0;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const Vec3 x = g.pos(i, j, k);
        if (!g.inside_domain(x)) continue;
        acc += source_field(src, x).norm2();
      }
    return acc;
  });
  f2 *= h3;

  std::vector<EnergyRow> rows;
  for (const auto& snap : traj.snapshots) {
    double lhs = 0.0, max_u = 0.0;
    for (std::size_t e = 0; e < snap.size(); ++e) {
      const Vec3 u = snap.value(e);
      max_u = std::max(max_u, u.norm2());
      if (g.inside_domain(g.pos(snap.idx[e]))) lhs += u.norm2();
    }
    lhs *= h3;
    max_u = std::sqrt(max_u);
    const double t = snap.t;
    const double rhs = t * t * t * std::exp(t / medium.rho0) / medium.rho0 * f2;
    rows.push_back({t, max_u, lhs, rhs, lhs <= rhs * (1.0 + 1e-6)});
  }
  return rows;
}

struct ConeReport {
  double tau;
  double gamma;
  double lhs;          // weighted |u|^2 over the truncated cone
  double rhs;          // (tau/(rho0*gamma))^2 * weighted |f|^2 over the cone
  double slack_scale;  // same rhs form with the cone widened to the whole domain
  double sup_u;        // largest |u| seen inside the cone
  double max_u;        // largest |u| anywhere, for the relative quiet check
  bool ok;
};

// Evaluates both sides of the weighted energy inequality on the discrete
// truncated cone t <= tau - slope*|x - x0|. Space: midpoint rule; time:
// trapezoid over the stored sample times.
inline ConeReport cone_report(const Trajectory& traj, const SourceModel& src,
                              const ElasticMedium& medium, const Vec3& x0,
                              double tau, double gamma) {
  const Grid& g = traj.grid;
  if (traj.snapshots.size() < 3)
    throw std::invalid_argument("cone_report needs at least 3 snapshots");
  const double t_max = traj.snapshots.back().t;
  if (tau > t_max + 1e-12)
    throw std::invalid_argument("cone tau exceeds the simulated window");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double slope = medium.cone_slope();
  const double h3 = g.h() * g.h() * g.h();

  // Nonzero-force nodes, reused across snapshot times.
  std::vector<std::pair<Vec3, double>> fsupp;
  const int N = g.nodes();
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const Vec3 x = g.pos(i, j, k);
        if (!g.inside_domain(x)) continue;
        const double fn2 = source_field(src, x).norm2();
        if (fn2 > 0.0) fsupp.emplace_back(x, fn2);
      }

  ConeReport rep{tau, gamma, 0.0, 0.0, 0.0, 0.0, 0.0, false};
  double prev_t = -1.0;
  for (std::size_t si = 0; si < traj.snapshots.size(); ++si) {
    const auto& snap = traj.snapshots[si];
    if (snap.t > tau + 1e-12) break;
    // trapezoid weight on the snapshot lattice
    double w;
    if (si == 0 || si + 1 == traj.snapshots.size() ||
        traj.snapshots[si + 1].t > tau + 1e-12) {
      w = 0.5 * (si == 0 ? traj.snapshots[1].t - snap.t : snap.t - prev_t);
    } else {
      w = 0.5 * (traj.snapshots[si + 1].t - prev_t);
    }
    prev_t = snap.t;
    const double decay = std::exp(-2.0 * gamma * snap.t);
    const double reach = (tau - snap.t) / slope;  // spatial radius at this time

    double u2 = 0.0;
    for (std::size_t e = 0; e < snap.size(); ++e) {
      const Vec3 x = g.pos(snap.idx[e]);
      const double un2 = snap.value(e).norm2();
      rep.max_u = std::max(rep.max_u, un2);
      if (!g.inside_domain(x)) continue;
      if ((x - x0).norm() <= reach) {
        u2 += un2;
        rep.sup_u = std::max(rep.sup_u, un2);
      }
    }
    double ff_cone = 0.0, ff_all = 0.0;
    for (const auto& [x, fn2] : fsupp) {
      ff_all += fn2;
      if ((x - x0).norm() <= reach) ff_cone += fn2;
    }
    rep.lhs += w * decay * u2 * h3;
    rep.rhs += w * decay * ff_cone * h3;
    rep.slack_scale += w * decay * ff_all * h3;
  }
  const double amp = tau / (medium.rho0 * gamma);
  rep.rhs *= amp * amp;
  rep.slack_scale *= amp * amp;
  rep.sup_u = std::sqrt(rep.sup_u);
  rep.max_u = std::sqrt(rep.max_u);
  rep.ok = rep.lhs <= rep.rhs + 1e-6 * rep.slack_scale;
  return rep;
}

}  // namespace egv
