#include "grh/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace grh {

namespace {

// P_m(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int m, double x) {
  double p = 1.0;
  double previous = 0.0;
  for (int j = 1; j <= m; ++j) {
    const double older = previous;
    previous = p;
    p = ((2.0 * j - 1.0) * x * previous - (j - 1.0) * older) / j;
  }
  return {p, m * (x * p - previous) / (x * x - 1.0)};
}

}  // namespace

GaussRule1D gauss_legendre(int m) {
  if (m < 1 || m > kMaxGaussPoints)
    throw std::invalid_argument("Gauss rule size must be in [1, " + std::to_string(kMaxGaussPoints) + "]");
  GaussRule1D rule;
  rule.points.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    bool converged = false;
    for (int it = 0; it < 100 && !converged; ++it) {
      const auto [p, dp] = legendre_with_derivative(m, x);
      const double step = p / dp;
      x -= step;
      converged = std::abs(step) <= 4e-16;
    }
    if (!converged) throw std::runtime_error("Legendre root iteration did not converge");
    const double dp = legendre_with_derivative(m, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.points[m / 2] = 0.0;
  return rule;
}

FaceRule tensor_face_rule(const GaussRule1D& rule) {
  FaceRule face;
  for (std::size_t a = 0; a < rule.size(); ++a)
    for (std::size_t b = 0; b < rule.size(); ++b) {
      face.points.push_back({rule.points[a], rule.points[b]});
      face.weights.push_back(rule.weights[a] * rule.weights[b]);
    }
  return face;
}

TriangleRule triangle_tensor_rule(int order) {
  if (order < 1 || order > kMaxTriangleOrder)
    throw std::invalid_argument("triangle rule order must be in [1, " + std::to_string(kMaxTriangleOrder) + "]");
  const auto g = gauss_legendre(order);
  TriangleRule tri;
  for (int a = 0; a < order; ++a) {
    const double u = 0.5 * (g.points[a] + 1.0);
    const double wu = 0.5 * g.weights[a];
    for (int b = 0; b < order; ++b) {
      const double v = 0.5 * (g.points[b] + 1.0);
      const double wv = 0.5 * g.weights[b];
      tri.points.push_back({u * (1.0 - v), u * v});
      tri.weights.push_back(wu * wv * u);
    }
  }
  return tri;
}

const char* to_string(PairCase c) {
  switch (c) {
    case PairCase::disjoint: return "disjoint";
    case PairCase::common_vertex: return "common_vertex";
    case PairCase::common_edge: return "common_edge";
    case PairCase::identical: return "identical";
  }
  return "unknown";
}

namespace {

// The singular transforms are written for the triangle {0 <= x2 <= x1 <= 1}
// parametrized as P0 + x1 (P1 - P0) + x2 (P2 - P1); in (s, t) coordinates
// that is s = x1 - x2, t = x2.
std::array<double, 2> to_st(double x1, double x2) { return {x1 - x2, x2}; }

}  // namespace

TrianglePairRule sauter_rule(PairCase pair_case, int order) {
  if (order < 1 || order > kMaxSauterOrder)
    throw std::invalid_argument("Sauter rule order must be in [1, " + std::to_string(kMaxSauterOrder) + "]");
  TrianglePairRule rule;
  rule.pair_case = pair_case;

  if (pair_case == PairCase::disjoint) {
    const auto tri = triangle_tensor_rule(order);
    for (std::size_t p = 0; p < tri.size(); ++p)
      for (std::size_t q = 0; q < tri.size(); ++q)
        rule.points.push_back({tri.points[p], tri.points[q], tri.weights[p] * tri.weights[q]});
    return rule;
  }
  if (pair_case != PairCase::common_vertex && pair_case != PairCase::common_edge && pair_case != PairCase::identical)
    throw std::invalid_argument("unknown pair case");

  const auto g = gauss_legendre(order);
  std::vector<double> nodes(order);
  std::vector<double> weights(order);
  for (int k = 0; k < order; ++k) {
    nodes[k] = 0.5 * (g.points[k] + 1.0);
    weights[k] = 0.5 * g.weights[k];
  }

  auto add = [&rule](double x1, double x2, double y1, double y2, double w) {
    rule.points.push_back({to_st(x1, x2), to_st(y1, y2), w});
  };

  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c)
        for (int d = 0; d < order; ++d) {
          const double xi = nodes[a];
          const double e1 = nodes[b];
          const double e2 = nodes[c];
          const double e3 = nodes[d];
          const double w = weights[a] * weights[b] * weights[c] * weights[d];
          switch (pair_case) {
            case PairCase::identical: {
              const double jac = w * xi * xi * xi * e1 * e1 * e2;
              add(xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), jac);
              add(xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), jac);
              add(xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), jac);
              add(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), jac);
              add(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), jac);
              add(xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), jac);
              break;
            }
            case PairCase::common_edge: {
              const double jac = w * xi * xi * xi * e1 * e1;
              add(xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2), jac);
              add(xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), jac * e2);
              add(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, jac * e2);
              add(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, jac * e2);
              add(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, jac * e2);
              break;
            }
            case PairCase::common_vertex: {
              const double jac = w * xi * xi * xi * e2;
              add(xi, xi * e1, xi * e2, xi * e2 * e3, jac);
              add(xi * e2, xi * e2 * e3, xi, xi * e1, jac);
              break;
            }
            case PairCase::disjoint: break;
          }
        }
  return rule;
}

}  // namespace grh
