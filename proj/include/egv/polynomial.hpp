#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "egv/geometry.hpp"

namespace egv {

// Dense trivariate polynomial of total degree <= 4 (35 monomials).
// Small enough for a flat table; supports the exact symbolic operations the
// harmonic machinery needs (derivatives, Laplacian, Hessian).
class Poly3 {
 public:
  static constexpr int kMaxDegree = 4;
  static constexpr int kTerms = 35;

  struct Mono {
    int8_t a, b, c;
  };

  // Monomial exponents ordered by total degree, then lexicographically.
  static const std::array<Mono, kTerms>& monomials() {
    static const std::array<Mono, kTerms> table = [] {
      std::array<Mono, kTerms> t{};
      int idx = 0;
      for (int d = 0; d <= kMaxDegree; ++d)
        for (int a = d; a >= 0; --a)
          for (int b = d - a; b >= 0; --b)
            t[idx++] = {int8_t(a), int8_t(b), int8_t(d - a - b)};
      return t;
    }();
    return table;
  }

  static int index_of(int a, int b, int c) {
    const auto& tab = monomials();
    for (int i = 0; i < kTerms; ++i)
      if (tab[i].a == a && tab[i].b == b && tab[i].c == c) return i;
    throw std::out_of_range("monomial degree exceeds 4");
  }

  Poly3() { coeff_.fill(0.0); }

  double& at(int a, int b, int c) { return coeff_[index_of(a, b, c)]; }
  double coeff(int i) const { return coeff_[i]; }
  double& coeff(int i) { return coeff_[i]; }

  int degree() const {
    int d = 0;
    const auto& tab = monomials();
    for (int i = 0; i < kTerms; ++i)
      if (coeff_[i] != 0.0) d = std::max(d, int(tab[i].a + tab[i].b + tab[i].c));
    return d;
  }

  double eval(const Vec3& x) const {
    const auto& tab = monomials();
    double px[5], py[5], pz[5];
    px[0] = py[0] = pz[0] = 1.0;
    for (int k = 1; k <= kMaxDegree; ++k) {
      px[k] = px[k - 1] * x.x;
      py[k] = py[k - 1] * x.y;
      pz[k] = pz[k - 1] * x.z;
    }
    double s = 0.0;
    for (int i = 0; i < kTerms; ++i)
      if (coeff_[i] != 0.0) s += coeff_[i] * px[tab[i].a] * py[tab[i].b] * pz[tab[i].c];
    return s;
  }

  Poly3 differentiate(int axis) const {
    const auto& tab = monomials();
    Poly3 d;
    for (int i = 0; i < kTerms; ++i) {
      if (coeff_[i] == 0.0) continue;
      int e[3] = {tab[i].a, tab[i].b, tab[i].c};
      if (e[axis] == 0) continue;
      const double c = coeff_[i] * e[axis];
      e[axis] -= 1;
      d.at(e[0], e[1], e[2]) += c;
    }
    return d;
  }

  Poly3 laplacian() const {
    Poly3 l;
    for (int ax = 0; ax < 3; ++ax) {
      const Poly3 dd = differentiate(ax).differentiate(ax);
      for (int i = 0; i < kTerms; ++i) l.coeff_[i] += dd.coeff_[i];
    }
    return l;
  }

  bool is_zero(double tol = 0.0) const {
    for (double c : coeff_)
      if (std::fabs(c) > tol) return false;
    return true;
  }

  Vec3 gradient(const Vec3& x) const {
    return {differentiate(0).eval(x), differentiate(1).eval(x), differentiate(2).eval(x)};
  }

  SymMat3 hessian(const Vec3& x) const {
    const Poly3 dx = differentiate(0), dy = differentiate(1), dz = differentiate(2);
    return {dx.differentiate(0).eval(x), dx.differentiate(1).eval(x),
            dx.differentiate(2).eval(x), dy.differentiate(1).eval(x),
            dy.differentiate(2).eval(x), dz.differentiate(2).eval(x)};
  }

 private:
  std::array<double, kTerms> coeff_;
};

}  // namespace egv
