#pragma once

#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "egv/geometry.hpp"

namespace egv {

// Where and when the gravity gradient is recorded: a fixed point cloud in an
// exterior ball, at the trajectory sample times. The cloud is drawn once from
// a seeded generator so runs are reproducible.
struct ObservationSpec {
  Vec3 center;
  double r0;
  std::vector<Vec3> points;
  std::vector<double> times;

  static ObservationSpec make(const Vec3& center, double r0, int point_count,
                              uint64_t seed, std::vector<double> sample_times,
                              double domain_radius) {
    if (!(r0 > 0.0)) throw std::invalid_argument("observation ball needs r0 > 0");
    if (!(center.norm() - r0 > domain_radius))
      throw std::invalid_argument(
          "observation ball must lie strictly outside the body: |center| - r0 <= R");
    if (point_count < 1) throw std::invalid_argument("need at least one observation point");
    ObservationSpec o;
    o.center = center;
    o.r0 = r0;
    o.times = std::move(sample_times);
    for (std::size_t i = 1; i < o.times.size(); ++i)
      if (!(o.times[i] > o.times[i - 1]))
        throw std::invalid_argument("sample times must be strictly increasing");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    o.points.reserve(point_count);
    while (int(o.points.size()) < point_count) {
      const Vec3 c{unit(rng), unit(rng), unit(rng)};
      if (c.norm2() <= 1.0) o.points.push_back(center + c * r0);
    }
    return o;
  }

  double ball_volume() const {
    return 4.0 / 3.0 * std::numbers::pi * r0 * r0 * r0;
  }
};

}  // namespace egv
