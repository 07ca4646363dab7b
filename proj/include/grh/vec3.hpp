#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace grh {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm2(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Axis-parallel box [lo_0,hi_0] x [lo_1,hi_1] x [lo_2,hi_2].
struct Box {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  static Box around(const Vec3& p) { return Box{p, p}; }

  [[nodiscard]] bool empty() const { return lo[0] > hi[0]; }

  void extend(const Vec3& p) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }

  void extend(const Box& b) {
    extend(b.lo);
    extend(b.hi);
  }

  [[nodiscard]] double extent(int axis) const { return hi[axis] - lo[axis]; }
  [[nodiscard]] double center(int axis) const { return 0.5 * (lo[axis] + hi[axis]); }

  /// max_k (hi_k - lo_k), the maximum-norm diameter.
  [[nodiscard]] double diam_inf() const { return std::max({extent(0), extent(1), extent(2)}); }

  [[nodiscard]] int longest_axis() const {
    int axis = 0;
    for (int k = 1; k < 3; ++k)
      if (extent(k) > extent(axis)) axis = k;
    return axis;
  }

  [[nodiscard]] bool contains(const Box& b) const {
    for (int k = 0; k < 3; ++k)
      if (b.lo[k] < lo[k] || b.hi[k] > hi[k]) return false;
    return true;
  }
};

/// Maximum-norm distance between two boxes (0 if they intersect).
inline double dist_inf(const Box& a, const Box& b) {
  double d = 0.0;
  for (int k = 0; k < 3; ++k) d = std::max({d, b.lo[k] - a.hi[k], a.lo[k] - b.hi[k]});
  return d;
}

inline double dist_inf(const Box& a, const Vec3& p) { return dist_inf(a, Box::around(p)); }

}  // namespace grh
