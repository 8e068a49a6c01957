#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace egv {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) {
    return i == 0 ? x : (i == 1 ? y : z);
  }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  double norm_inf() const {
    return std::max({std::fabs(x), std::fabs(y), std::fabs(z)});
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Symmetric 3x3 tensor, six independent components.
struct SymMat3 {
  double m11 = 0, m12 = 0, m13 = 0, m22 = 0, m23 = 0, m33 = 0;

  double operator()(int i, int j) const {
    static constexpr int k[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    const std::array<const double*, 6> p = {&m11, &m12, &m13, &m22, &m23, &m33};
    return *p[k[i][j]];
  }

  double trace() const { return m11 + m22 + m33; }

  SymMat3 deviator() const {
    const double s = trace() / 3.0;
    return {m11 - s, m12, m13, m22 - s, m23, m33 - s};
  }

  Vec3 apply(const Vec3& v) const {
    return {m11 * v.x + m12 * v.y + m13 * v.z,
            m12 * v.x + m22 * v.y + m23 * v.z,
            m13 * v.x + m23 * v.y + m33 * v.z};
  }

  // Double contraction A:B.
  double contract(const SymMat3& o) const {
    return m11 * o.m11 + m22 * o.m22 + m33 * o.m33 +
           2.0 * (m12 * o.m12 + m13 * o.m13 + m23 * o.m23);
  }

  double frobenius() const { return std::sqrt(contract(*this)); }

  SymMat3 operator+(const SymMat3& o) const {
    return {m11 + o.m11, m12 + o.m12, m13 + o.m13,
            m22 + o.m22, m23 + o.m23, m33 + o.m33};
  }
  SymMat3 operator-(const SymMat3& o) const {
    return {m11 - o.m11, m12 - o.m12, m13 - o.m13,
            m22 - o.m22, m23 - o.m23, m33 - o.m33};
  }
  SymMat3 operator*(double s) const {
    return {m11 * s, m12 * s, m13 * s, m22 * s, m23 * s, m33 * s};
  }
};

}  // namespace egv
