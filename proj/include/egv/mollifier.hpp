#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace egv {

// Radial C^2 bump of unit mass supported on [0, d0/2):
//   q(r) = c * (1 - (2r/d0)^2)^3,  c = 315 / (64*pi*(d0/2)^3).
// Both q' and q'' vanish at the support edge.
struct Mollifier {
  double d0;

  explicit Mollifier(double d0_) : d0(d0_) {
    if (!(d0 > 0.0)) throw std::invalid_argument("mollifier requires d0 > 0");
  }

  double support_radius() const { return 0.5 * d0; }

  double normalization() const {
    const double a = support_radius();
    return 315.0 / (64.0 * std::numbers::pi * a * a * a);
  }

  double value(double r) const {
    const double a = support_radius();
    if (r >= a) return 0.0;
    const double w = 1.0 - (r * r) / (a * a);
    return normalization() * w * w * w;
  }

  double derivative(double r) const {
    const double a = support_radius();
    if (r >= a) return 0.0;
    const double w = 1.0 - (r * r) / (a * a);
    return -6.0 * normalization() * r * w * w / (a * a);
  }

  // q'(r)/r, finite at r = 0; this is the weight the source field carries.
  double slope_over_r(double r) const {
    const double a = support_radius();
    if (r >= a) return 0.0;
    const double w = 1.0 - (r * r) / (a * a);
    return -6.0 * normalization() * w * w / (a * a);
  }

  double slope_over_r_from_r2(double r2) const {
    const double a2 = support_radius() * support_radius();
    if (r2 >= a2) return 0.0;
    const double w = 1.0 - r2 / a2;
    return -6.0 * normalization() * w * w / a2;
  }
};

}  // namespace egv
