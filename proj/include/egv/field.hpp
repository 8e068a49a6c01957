#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "egv/geometry.hpp"

namespace egv {

// Uniform node grid over the cube [-L, L]^3 enclosing the ball |x| < R.
// n cells per axis, n+1 nodes, spacing h = 2L/n. Nodes are the quadrature
// points (midpoint rule on the dual cells).
struct Grid {
  int n;
  double half_width;  // L
  double radius;      // R

  Grid(int n_, double L, double R) : n(n_), half_width(L), radius(R) {
    if (n < 4) throw std::invalid_argument("grid requires n >= 4");
    if (!(L > R) || !(R > 0.0)) throw std::invalid_argument("grid requires L > R > 0");
  }

  double h() const { return 2.0 * half_width / n; }
  int nodes() const { return n + 1; }
  std::size_t node_count() const {
    const std::size_t N = nodes();
    return N * N * N;
  }
  std::size_t index(int i, int j, int k) const {
    const std::size_t N = nodes();
    return (std::size_t(k) * N + j) * N + i;
  }
  Vec3 pos(int i, int j, int k) const {
    return {-half_width + i * h(), -half_width + j * h(), -half_width + k * h()};
  }
  Vec3 pos(std::size_t lin) const {
    const std::size_t N = nodes();
    const int i = int(lin % N), j = int((lin / N) % N), k = int(lin / (N * N));
    return pos(i, j, k);
  }
  bool inside_domain(const Vec3& x) const { return x.norm2() < radius * radius; }
};

// Vector field on grid nodes, component-major, x-fastest.
struct VectorField {
  Grid grid;
  std::vector<double> data;

  explicit VectorField(const Grid& g) : grid(g), data(3 * g.node_count(), 0.0) {}

  double* comp(int c) { return data.data() + std::size_t(c) * grid.node_count(); }
  const double* comp(int c) const {
    return data.data() + std::size_t(c) * grid.node_count();
  }
  Vec3 at(std::size_t lin) const {
    return {comp(0)[lin], comp(1)[lin], comp(2)[lin]};
  }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

struct WaveState {
  VectorField u;
  VectorField v;
  double t = 0.0;

  explicit WaveState(const Grid& g) : u(g), v(g) {}
};

// Displacement snapshot restricted to its nonzero nodes. With floor_rel = 0
// this is lossless: the scheme's domain of influence is finite, so omitted
// nodes are identically zero in double arithmetic. A positive floor_rel also
// drops entries below floor_rel * max|u|; the stencil smears round-off one
// node outward per step, and those ~1e-250 ghosts would otherwise reach the
// boundary sphere on coarse grids and look like source support to the
// potential evaluator.
struct SparseSnapshot {
  double t = 0.0;
  std::vector<uint32_t> idx;
  std::vector<double> ux, uy, uz;

  std::size_t size() const { return idx.size(); }
  Vec3 value(std::size_t k) const { return {ux[k], uy[k], uz[k]}; }
};

inline SparseSnapshot sparsify(const VectorField& u, double t, double floor_rel = 0.0) {
  SparseSnapshot s;
  s.t = t;
  const double* c0 = u.comp(0);
  const double* c1 = u.comp(1);
  const double* c2 = u.comp(2);
  const std::size_t total = u.grid.node_count();
  double cut = 0.0;
  if (floor_rel > 0.0) {
    double vmax = 0.0;
    for (std::size_t lin = 0; lin < total; ++lin)
      vmax = std::max({vmax, std::fabs(c0[lin]), std::fabs(c1[lin]), std::fabs(c2[lin])});
    cut = floor_rel * vmax;
  }
  for (std::size_t lin = 0; lin < total; ++lin) {
    const double m =
        std::max({std::fabs(c0[lin]), std::fabs(c1[lin]), std::fabs(c2[lin])});
    if (m != 0.0 && m > cut) {
      s.idx.push_back(uint32_t(lin));
      s.ux.push_back(c0[lin]);
      s.uy.push_back(c1[lin]);
      s.uz.push_back(c2[lin]);
    }
  }
  return s;
}

struct StepDiagnostics {
  double t;
  double max_u;    // max Euclidean |u| over nodes
  double energy;   // kinetic + strain energy of the discrete state
};

struct Trajectory {
  Grid grid;
  double dt = 0.0;
  std::vector<SparseSnapshot> snapshots;     // at the sample times, t=0 first
  std::vector<StepDiagnostics> steps;        // one row per time step

  explicit Trajectory(const Grid& g) : grid(g) {}

  const SparseSnapshot& at_time(double t, double tol = 1e-12) const {
    for (const auto& s : snapshots)
      if (std::fabs(s.t - t) <= tol * std::max(1.0, std::fabs(t))) return s;
    throw std::invalid_argument("no snapshot stored at t = " + std::to_string(t));
  }
};

}  // namespace egv
