#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace grh {

/// m-point Gauss-Legendre rule on [-1, 1].
struct GaussRule1D {
  std::vector<double> points;
  std::vector<double> weights;
  [[nodiscard]] std::size_t size() const { return points.size(); }
};

constexpr int kMaxGaussPoints = 64;

/// Nodes are the roots of P_m found by Newton's method from Chebyshev
/// guesses. Throws std::invalid_argument outside 1 <= m <= 64.
GaussRule1D gauss_legendre(int m);

/// Tensor rule on the face parameter domain Q = [-1, 1]^2.
struct FaceRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  [[nodiscard]] std::size_t size() const { return points.size(); }
};

FaceRule tensor_face_rule(const GaussRule1D& rule);

/// Rule on the reference triangle with corners (0,0), (1,0), (0,1); a
/// point (s, t) maps to P0 + s (P1 - P0) + t (P2 - P0). Weights sum to 1/2.
struct TriangleRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  [[nodiscard]] std::size_t size() const { return points.size(); }
};

constexpr int kMaxTriangleOrder = 16;

/// Collapsed (Duffy) tensor Gauss rule with order^2 points.
TriangleRule triangle_tensor_rule(int order);

/// How two triangles of a mesh touch.
enum class PairCase { disjoint = 0, common_vertex = 1, common_edge = 2, identical = 3 };

const char* to_string(PairCase c);

/// Four-dimensional rule for integrals over reference triangle x
/// reference triangle. For the touching cases the two triangles must be
/// parametrized so that the shared vertices come first and in the same
/// order: common vertex at (0,0); common edge along t = 0.
struct TrianglePairRule {
  struct Point {
    std::array<double, 2> x;
    std::array<double, 2> y;
    double weight;
  };
  PairCase pair_case = PairCase::disjoint;
  std::vector<Point> points;
  [[nodiscard]] std::size_t size() const { return points.size(); }
};

constexpr int kMaxSauterOrder = 10;

/// Regularizing (Sauter-Schwab) rule with `order` Gauss points per
/// dimension; the disjoint case is the plain product of triangle rules.
TrianglePairRule sauter_rule(PairCase pair_case, int order);

}  // namespace grh
