#pragma once

// Fundamental solution of the negative Laplacian in 3D,
//   g(x, y) = 1 / (4 pi |x - y|),
// and its normal derivatives. All evaluators throw std::domain_error for
// coincident arguments.

#include <numbers>
#include <stdexcept>

#include "grh/vec3.hpp"

namespace grh {

inline constexpr double kInvFourPi = 0.25 * std::numbers::inv_pi;

namespace detail {

inline double checked_r2(const Vec3& d) {
  const double r2 = dot(d, d);
  if (!(r2 > 0.0)) throw std::domain_error("Laplace kernel evaluated at coincident points");
  return r2;
}

}  // namespace detail

inline double eval_g(const Vec3& x, const Vec3& y) {
  const double r2 = detail::checked_r2(x - y);
  return kInvFourPi / std::sqrt(r2);
}

/// <grad_y g(x, y), n> = <x - y, n> / (4 pi |x - y|^3)
inline double eval_dg_dn_y(const Vec3& x, const Vec3& y, const Vec3& n) {
  const Vec3 d = x - y;
  const double r2 = detail::checked_r2(d);
  const double r = std::sqrt(r2);
  return kInvFourPi * dot(d, n) / (r2 * r);
}

/// <grad_x g(x, y), n> = <y - x, n> / (4 pi |x - y|^3)
inline double eval_dg_dn_x(const Vec3& x, const Vec3& y, const Vec3& n) {
  const Vec3 d = y - x;
  const double r2 = detail::checked_r2(d);
  const double r = std::sqrt(r2);
  return kInvFourPi * dot(d, n) / (r2 * r);
}

/// Mixed derivative <n_x, grad_x> <n_y, grad_y> g(x, y)
///   = (<n_x, n_y> - 3 <x-y, n_x> <x-y, n_y> / |x-y|^2) / (4 pi |x-y|^3).
/// Needed for the column-side factors of the double layer operator.
inline double eval_d2g_dnx_dny(const Vec3& x, const Vec3& y, const Vec3& nx, const Vec3& ny) {
  const Vec3 d = x - y;
  const double r2 = detail::checked_r2(d);
  const double r = std::sqrt(r2);
  return kInvFourPi * (dot(nx, ny) - 3.0 * dot(d, nx) * dot(d, ny) / r2) / (r2 * r);
}

}  // namespace grh
