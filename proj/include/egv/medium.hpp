#pragma once

#include <cmath>
#include <stdexcept>

namespace egv {

// Homogeneous isotropic elastic medium (Lame parameters + density).
struct ElasticMedium {
  double lambda0;
  double mu0;
  double rho0;

  ElasticMedium(double lambda, double mu, double rho)
      : lambda0(lambda), mu0(mu), rho0(rho) {
    if (!(lambda0 > 0.0) || !(mu0 > 0.0) || !(rho0 > 0.0))
      throw std::invalid_argument("elastic medium requires positive lambda0, mu0, rho0");
  }

  double cp() const { return std::sqrt((lambda0 + 2.0 * mu0) / rho0); }
  double cs() const { return std::sqrt(mu0 / rho0); }

  // Slope of the weighted space-time cone used by the energy estimates;
  // its inverse is sqrt(2)*cp, so the cone is strictly wider than the
  // physical domain of influence.
  double cone_slope() const {
    return std::sqrt(rho0 / (2.0 * (lambda0 + 2.0 * mu0)));
  }
};

}  // namespace egv
