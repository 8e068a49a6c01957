#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "egv/config.hpp"
#include "egv/elastic.hpp"
#include "egv/gravity.hpp"
#include "egv/harmonics.hpp"
#include "egv/inversion.hpp"
#include "egv/io.hpp"
#include "egv/parallel.hpp"
#include "egv/svg.hpp"
#include "egv/verify.hpp"

// Drivers behind the command line subcommands. They are header functions so
// the test suite can run them in process and inspect the files they emit.

namespace egv {

struct RunSetup {
  Grid grid;
  ElasticMedium medium;
  SourceModel src;
  ObservationSpec obs;
  double quiet_time = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
};

inline RunSetup make_setup(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  Grid grid(cfg.cells, cfg.half_width, cfg.radius);
  const ElasticMedium medium = cfg.medium();
  const SourceModel src = SourceModel::make(cfg.moment, cfg.center, cfg.d0);
  // an exactly zero moment is a legal forward problem (quiet body); the
  // magnitude bounds are hypotheses of the inversion, not of the PDE
  if (src.moment.frobenius() > 0.0) {
    const auto problems = validate_source(src, cfg.radius, cfg.bounds());
    if (!problems.empty()) {
      std::string msg = "source configuration rejected:";
      for (const auto& p : problems) msg += "\n  - " + p;
      throw std::invalid_argument(msg);
    }
  }
  const double quiet = boundary_quiet_time(src, medium);
  const double t0 = cfg.t0_factor * quiet;
  const double t1 = cfg.t1_factor * t0;
  // the early read time must land on a stored snapshot
  const double steps_to_t1 = cfg.t1_factor * cfg.snapshots;
  if (std::fabs(steps_to_t1 - std::round(steps_to_t1)) > 1e-9)
    throw std::invalid_argument("config: t1_factor * snapshots must be an integer");

  std::vector<double> times;
  times.reserve(std::size_t(cfg.snapshots));
  for (int k = 1; k <= cfg.snapshots; ++k) times.push_back(t0 * k / cfg.snapshots);
  ObservationSpec obs = ObservationSpec::make(cfg.obs_center, cfg.obs_radius, cfg.obs_points,
                                              cfg.obs_seed, times, cfg.radius);
  return RunSetup{grid, medium, src, std::move(obs), quiet, t0, t1};
}

inline SphereQuadrature make_quadrature(const RunConfig& cfg, double radius) {
  return SphereQuadrature::gauss_legendre(radius, cfg.sphere_theta, 2 * cfg.sphere_theta);
}

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void ensure_outdir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, const std::string& outdir, std::ostream& log) {
  const RunSetup s = make_setup(cfg);
  detail::ensure_outdir(outdir);
  log << "simulate: n = " << cfg.cells << ", h = " << s.grid.h() << ", quiet time = "
      << s.quiet_time << ", t0 = " << s.t0 << ", t1 = " << s.t1 << "\n";

  SimulateOptions opt;
  opt.cfl = cfg.cfl;
  opt.sample_count = cfg.snapshots;
  // full-state snapshot files at the two read times of the inversion
  const int sample_t1 = int(std::lround(cfg.t1_factor * cfg.snapshots));
  std::string bytes_t1, bytes_t0;
  opt.on_sample = [&](const WaveState& st, int k) {
    if (k == sample_t1) bytes_t1 = encode_snapshot(s.grid, st.u, st.v, st.t);
    if (k == cfg.snapshots) bytes_t0 = encode_snapshot(s.grid, st.u, st.v, st.t);
  };
  const Trajectory traj = simulate(s.grid, s.medium, s.src, s.t0, opt);
  log << "simulate: " << traj.steps.size() << " steps, dt = " << traj.dt << "\n";
  atomic_write(detail::join_path(outdir, "state_t1.egv"), bytes_t1);
  atomic_write(detail::join_path(outdir, "state_t0.egv"), bytes_t0);

  const auto energy = energy_report(traj, s.medium, s.src);
  {
    std::string csv = "t,max_u,energy_lhs,energy_rhs,ok\n";
    for (const auto& r : energy)
      csv += csv_num(r.t) + ',' + csv_num(r.max_u) + ',' + csv_num(r.lhs) + ',' +
             csv_num(r.rhs) + ',' + (r.ok ? "1" : "0") + '\n';
    atomic_write(detail::join_path(outdir, "diagnostics.csv"), csv);
  }
  bool energy_ok = true;
  for (const auto& r : energy) energy_ok = energy_ok && r.ok;
  log << "simulate: energy bound " << (energy_ok ? "holds" : "VIOLATED")
      << " on " << energy.size() << " samples\n";

  const GravityTrace trace = compute_trace(traj, s.medium, s.obs);
  write_trace_csv(detail::join_path(outdir, "trace.csv"), trace);
  log << "simulate: trace has " << trace.times.size() << " times x " << trace.points.size()
      << " points\n";

  atomic_write(detail::join_path(outdir, "run_config.cfg"), config_text(cfg));
  return energy_ok ? 0 : 1;
}

namespace detail {

inline void write_inversion_outputs(const ReconstructionResult& rec, const RunConfig& cfg,
                                    const std::string& outdir, std::ostream& log) {
  const SymMat3& m = rec.moment;
  {
    std::string csv = "M11,M22,M33,M12,M13,M23,P1,P2,P3,sigma_min,res_moment,res_loc\n";
    csv += csv_num(m.m11) + ',' + csv_num(m.m22) + ',' + csv_num(m.m33) + ',' +
           csv_num(m.m12) + ',' + csv_num(m.m13) + ',' + csv_num(m.m23) + ',' +
           csv_num(rec.location.x) + ',' + csv_num(rec.location.y) + ',' +
           csv_num(rec.location.z) + ',' + csv_num(rec.sigma_min) + ',' +
           csv_num(rec.res_moment) + ',' + csv_num(rec.res_loc) + '\n';
    atomic_write(join_path(outdir, "result.csv"), csv);
  }
  {
    std::string csv = "phi_id,z,G\n";
    for (std::size_t i = 0; i < rec.functionals.ids.size(); ++i)
      csv += rec.functionals.ids[i] + ',' + csv_num(rec.functionals.z[i]) + ',' +
             csv_num(rec.functionals.g[i]) + '\n';
    atomic_write(join_path(outdir, "functionals.csv"), csv);
  }

  // a zero moment in the config means no reference source is known
  const bool truth_known = cfg.moment.frobenius() > 0.0;
  char line[256];
  std::string text;
  if (rec.no_source) {
    text += "no source detected: |M^| below the detection floor\n";
  } else {
    std::snprintf(line, sizeof line,
                  "M^ = [%9.6f %9.6f %9.6f ; . %9.6f %9.6f ; . . %9.6f]  (|M^|_F = %.6f)\n",
                  m.m11, m.m12, m.m13, m.m22, m.m23, m.m33, m.frobenius());
    text += line;
    std::snprintf(line, sizeof line, "P^ = (%9.6f, %9.6f, %9.6f)\n", rec.location.x,
                  rec.location.y, rec.location.z);
    text += line;
    std::snprintf(line, sizeof line,
                  "sigma_min = %.3e, res_moment = %.3e, res_loc = %.3e\n", rec.sigma_min,
                  rec.res_moment, rec.res_loc);
    text += line;
  }
  if (truth_known && !rec.no_source) {
    const SourceModel truth = SourceModel::make(cfg.moment, cfg.center, cfg.d0);
    const double dm = (m - truth.moment).frobenius() / truth.moment.frobenius();
    const double dp = (rec.location - truth.center).norm();
    std::snprintf(line, sizeof line,
                  "against configured truth: |dM|/|M| = %.3e, |dP| = %.3e\n", dm, dp);
    text += line;

    const std::vector<std::string> labels = {"M11", "M12", "M13", "M22", "M23", "M33"};
    const std::vector<double> a = {truth.moment.m11, truth.moment.m12, truth.moment.m13,
                                   truth.moment.m22, truth.moment.m23, truth.moment.m33};
    const std::vector<double> b = {m.m11, m.m12, m.m13, m.m22, m.m23, m.m33};
    atomic_write(join_path(outdir, "moments.svg"),
                 svg::paired_bars("moment tensor", labels, a, b, "reference", "recovered"));
  }
  atomic_write(join_path(outdir, "summary.txt"), text);

  if (rec.no_source) {
    log << "invert: no source detected (|M| below the detection floor)\n";
  } else {
    log << "invert: |M| = " << rec.moment.frobenius() << ", P = (" << rec.location.x << ", "
        << rec.location.y << ", " << rec.location.z << "), sigma_min = " << rec.sigma_min << "\n";
  }
}

}  // namespace detail

inline int cmd_invert(const RunConfig& cfg, const std::string& input, const std::string& outdir,
                      std::ostream& log) {
  validate_config(cfg);
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  detail::ensure_outdir(outdir);
  const std::string bytes = read_file(input);

  ReconstructionResult rec;
  if (looks_like_snapshot(bytes)) {
    const DenseSnapshot dense = decode_snapshot(bytes);
    log << "invert: state input, n = " << dense.grid.n << ", t = " << dense.t << "\n";
    const ElasticMedium medium = cfg.medium();
    const SphereQuadrature quad = make_quadrature(cfg, dense.grid.radius);
    const SparseSnapshot snap = sparsify(dense.u, dense.t, 1e-100);
    const SurfaceSamples samples = surface_samples(snap, dense.grid, medium, quad);
    rec = reconstruct_from_samples(samples, quad, dense.t, cfg.bounds());
  } else {
    const GravityTrace trace = decode_trace_csv(bytes);
    const RunSetup s = make_setup(cfg);
    log << "invert: trace input, " << trace.times.size() << " times x " << trace.points.size()
        << " points, reading at t1 = " << s.t1 << "\n";
    const SphereQuadrature quad = make_quadrature(cfg, cfg.radius);
    const MultipoleExpansion fit = multipole_fit(trace.points, trace.at_time(s.t1),
                                                 Vec3{0, 0, 0}, cfg.lmax, 0.99 * cfg.radius);
    write_multipole_csv(detail::join_path(outdir, "multipole.csv"), fit);
    log << "invert: multipole fit residual = " << fit.fit_residual
        << ", condition = " << fit.condition << "\n";
    rec = reconstruct_from_expansion(fit, quad, s.t1, cfg.bounds());
  }

  detail::write_inversion_outputs(rec, cfg, outdir, log);
  return 0;
}

inline int cmd_sweep(const RunConfig& cfg, const std::string& outdir, std::ostream& log) {
  const RunSetup s = make_setup(cfg);
  detail::ensure_outdir(outdir);

  SweepSetup setup{s.grid, s.medium, s.src, s.obs, make_quadrature(cfg, cfg.radius),
                   cfg.bounds(), s.t0, s.t1};
  setup.cfl = cfg.cfl;
  setup.sample_count = cfg.snapshots;
  setup.lmax = cfg.lmax;
  log << "sweep: base run plus " << 2 * setup.deltas.size() << " perturbed runs at n = "
      << cfg.cells << "\n";
  const SweepResult result = stability_sweep(setup);

  // rows come in two blocks of rising delta: the moment direction first, then
  // the location direction
  std::string csv = "delta,eps,dM,dP,ratio_recon,ratio_truth\n";
  for (const auto& r : result.rows)
    csv += csv_num(r.delta) + ',' + csv_num(r.eps) + ',' + csv_num(r.dm) + ',' +
           csv_num(r.dp) + ',' + csv_num(r.ratio_recon) + ',' + csv_num(r.ratio_truth) + '\n';
  atomic_write(detail::join_path(outdir, "sweep.csv"), csv);

  svg::Plot plot;
  plot.title = "source distance vs data distance";
  plot.x_label = "data distance eps";
  plot.y_label = "recovered source distance";
  plot.log_x = plot.log_y = true;
  svg::Series sm, sl;
  sm.label = "moment direction";
  sm.color = "#1f6fb2";
  sl.label = "location direction";
  sl.color = "#d2691e";
  for (const auto& r : result.rows) {
    auto& ser = (r.direction == "moment") ? sm : sl;
    ser.x.push_back(r.eps);
    ser.y.push_back(r.d_recon);
  }
  plot.series = {sm, sl};
  atomic_write(detail::join_path(outdir, "sweep.svg"), plot.render());

  log << "sweep: measured stability constant = " << result.measured_c << "\n";
  atomic_write(detail::join_path(outdir, "run_config.cfg"), config_text(cfg));
  return 0;
}

inline int cmd_verify(const RunConfig& cfg, const std::string& outdir, std::ostream& log) {
  const RunSetup s = make_setup(cfg);
  detail::ensure_outdir(outdir);
  std::vector<OracleRow> rows;

  {
    const OracleReport rep = mollifier_moment_report(Mollifier{cfg.d0});
    for (const auto& r : rep.rows) rows.push_back(r);
    log << "verify: profile moments, worst |err| = " << rep.max_abs_err() << " (" << rep.meta
        << ")\n";
  }

  const double scale = s.src.moment.frobenius();
  for (const auto& phi : test_basis()) {
    OracleRow row;
    row.name = "functional_" + phi.id;
    row.value = functional_oracle(s.src, phi.poly);
    row.reference = moment_functional_closed_form(s.src, phi);
    row.abs_err = std::fabs(row.value - row.reference);
    row.rel_err = row.abs_err / std::max(std::fabs(row.reference), scale);
    row.pass = row.rel_err <= 1e-4;
    rows.push_back(row);
  }

  // short forward run shared by the surface/volume comparison and the weak
  // residual probes
  SimulateOptions opt;
  opt.cfl = cfg.cfl;
  opt.sample_count = 4;
  const Trajectory traj = simulate(s.grid, s.medium, s.src, s.t1, opt);
  const SparseSnapshot& snap = traj.at_time(s.t1, 1e-9 * s.t1);
  const SphereQuadrature quad = make_quadrature(cfg, cfg.radius);
  const SurfaceSamples samples = surface_samples(snap, s.grid, s.medium, quad);
  {
    double worst = 0.0;
    const auto basis = test_basis();
    for (const auto& phi : basis) {
      const double zb = boundary_z(samples, quad, phi);
      const double zv = volume_functional(snap, s.grid, s.medium, phi.poly);
      worst = std::max(worst, std::fabs(zb - zv));
    }
    OracleRow row;
    row.name = "surface_vs_volume";
    row.value = worst;
    row.reference = 0.0;
    row.abs_err = worst;
    row.rel_err = worst / std::max(scale * s.t1 * s.t1, 1e-300);
    row.pass = row.rel_err <= 1e-8;
    rows.push_back(row);
    log << "verify: surface vs volume functionals, worst |diff| = " << worst << "\n";
  }

  {
    const DuhamelReport rep = duhamel_check(s.grid, s.medium, s.src, s.t1, cfg.cfl);
    OracleRow row;
    row.name = "duhamel_rel_err";
    row.value = rep.rel_err;
    row.reference = 0.0;
    row.abs_err = rep.rel_err;
    row.rel_err = rep.rel_err;
    row.pass = rep.rel_err <= 1e-6;
    row.meta = rep.convention;
    rows.push_back(row);
    log << "verify: duhamel superposition rel err = " << rep.rel_err << " over " << rep.steps
        << " steps (" << rep.convention << ")\n";
  }

  {
    // five random bumps: three straddling the boundary sphere, two interior
    const auto probes = boundary_probes(cfg.radius, 3, 0.1 * cfg.radius, cfg.obs_seed, 2);
    const auto presults = poisson_residual(snap, s.grid, s.medium, probes);
    double worst = 0.0;
    for (const auto& r : presults) worst = std::max(worst, r.rel_err);
    OracleRow row;
    row.name = "poisson_weak_residual";
    row.value = worst;
    row.reference = 0.0;
    row.abs_err = worst;
    row.rel_err = worst;
    row.pass = worst <= 1e-2;
    rows.push_back(row);
    log << "verify: weak residual over " << probes.size() << " bumps, worst = " << worst
        << "\n";
  }

  std::string csv = "name,value,reference,abs_err,rel_err,pass,cells,h,meta\n";
  bool all = true;
  for (const auto& r : rows) {
    csv += r.name + ',' + csv_num(r.value) + ',' + csv_num(r.reference) + ',' +
           csv_num(r.abs_err) + ',' + csv_num(r.rel_err) + ',' + (r.pass ? "1" : "0") + ',' +
           std::to_string(cfg.cells) + ',' + csv_num(s.grid.h()) + ',' + r.meta + '\n';
    all = all && r.pass;
  }
  atomic_write(detail::join_path(outdir, "verify.csv"), csv);
  log << "verify: " << rows.size() << " checks, " << (all ? "all pass" : "FAILURES present")
      << "\n";
  return all ? 0 : 1;
}

}  // namespace egv
