#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "egv/geometry.hpp"
#include "egv/medium.hpp"
#include "egv/mollifier.hpp"

namespace egv {

struct SourceBounds {
  double moment_min = 0.5;  // lower Frobenius bound every admissible source obeys
  double moment_max = 5.0;  // upper Frobenius bound
};

// Point-like seismic source: symmetric trace-free moment tensor applied to the
// gradient of a mollified delta at center P.
struct SourceModel {
  SymMat3 moment;       // trace-free by construction
  Vec3 center;
  double d0;
  double trace_removed; // |trace/3| projected out of the caller's tensor

  static SourceModel make(const SymMat3& m_raw, const Vec3& p, double d0) {
    SourceModel s;
    s.moment = m_raw.deviator();
    s.center = p;
    s.d0 = d0;
    s.trace_removed = std::fabs(m_raw.trace() / 3.0);
    (void)Mollifier(d0);  // validates d0 > 0
    return s;
  }

  Mollifier mollifier() const { return Mollifier(d0); }
};

// f(x) = -M grad q(|x-P|) = -(q'(r)/r) M (x-P).
inline Vec3 source_field(const SourceModel& src, const Vec3& x) {
  const Vec3 y = x - src.center;
  const double w = src.mollifier().slope_over_r_from_r2(y.norm2());
  if (w == 0.0) return {0.0, 0.0, 0.0};
  return src.moment.apply(y) * (-w);
}

// Time before which no wave from the source support can register on the
// boundary of the ball of radius R (and the inversion window must close).
inline double boundary_quiet_time(const SourceModel& src, const ElasticMedium& medium) {
  return medium.cone_slope() * 0.5 * src.d0;
}

// Admissibility of a source inside the ball |x| < R. Returns human-readable
// violations; empty means valid.
inline std::vector<std::string> validate_source(const SourceModel& src, double R,
                                                const SourceBounds& bounds) {
  std::vector<std::string> v;
  const double fro = src.moment.frobenius();
  if (src.trace_removed > 1e-12 * std::max(fro, 1.0))
    v.push_back("trace(M) != 0 (removed " + std::to_string(src.trace_removed) + " per axis)");
  if (fro < bounds.moment_min)
    v.push_back("|M|_F below moment_min");
  if (fro > bounds.moment_max)
    v.push_back("|M|_F above moment_max");
  if (!(src.d0 > 0.0))
    v.push_back("d0 <= 0");
  const double dist_to_boundary = R - src.center.norm();
  if (!(dist_to_boundary > src.d0))
    v.push_back("source center closer than d0 to the boundary");
  return v;
}

}  // namespace egv
