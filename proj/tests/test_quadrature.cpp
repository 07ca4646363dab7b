#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "grh/kernel.hpp"
#include "grh/quadrature.hpp"
#include "grh/vec3.hpp"

using namespace grh;

namespace {

// Legendre P_m by the three-term recurrence.
double legendre(int m, double x) {
  double p0 = 1.0, p1 = x;
  if (m == 0) return p0;
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double bisect(const std::function<double(double)>& f, double a, double b) {
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (a + b);
    if ((f(a) < 0.0) == (f(c) < 0.0))
      a = c;
    else
      b = c;
  }
  return 0.5 * (a + b);
}

using Tri = std::array<Vec3, 3>;

Vec3 map(const Tri& t, const std::array<double, 2>& st) {
  return t[0] + st[0] * (t[1] - t[0]) + st[1] * (t[2] - t[0]);
}

double area(const Tri& t) { return 0.5 * norm2(cross(t[1] - t[0], t[2] - t[0])); }

double pair_value(const TrianglePairRule& rule, const Tri& x, const Tri& y) {
  double sum = 0.0;
  for (const auto& p : rule.points) sum += p.weight * eval_g(map(x, p.x), map(y, p.y));
  return 4.0 * area(x) * area(y) * sum;
}

double regular_pair(const Tri& x, const Tri& y, int order) {
  const TriangleRule r = triangle_tensor_rule(order);
  double sum = 0.0;
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < r.size(); ++b)
      sum += r.weights[a] * r.weights[b] * eval_g(map(x, r.points[a]), map(y, r.points[b]));
  return 4.0 * area(x) * area(y) * sum;
}

std::array<Tri, 4> children(const Tri& t) {
  const Vec3 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m02 = 0.5 * (t[0] + t[2]);
  return {Tri{t[0], m01, m02}, Tri{m01, t[1], m12}, Tri{m02, m12, t[2]}, Tri{m01, m12, m02}};
}

// Both triangles share corner 0. Refine toward it; only the two corner
// children touch, the other pairs are integrated with a high-order
// product rule.
double refined_common_vertex(const Tri& x, const Tri& y, int depth) {
  if (depth == 0) return 0.0;
  const auto cx = children(x), cy = children(y);
  double sum = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      sum += (a == 0 && b == 0) ? refined_common_vertex(cx[0], cy[0], depth - 1) : regular_pair(cx[a], cy[b], 12);
  return sum;
}

}  // namespace

TEST_CASE("gauss rules") {
  auto r1 = gauss_legendre(1);
  CHECK(r1.points[0] == doctest::Approx(0.0));
  CHECK(r1.weights[0] == doctest::Approx(2.0));

  auto r2 = gauss_legendre(2);
  const double root = bisect([](double x) { return legendre(2, x); }, 0.1, 1.0);
  CHECK(std::abs(r2.points[1] - root) < 1e-15);
  CHECK(std::abs(r2.points[1] - 0.5773502691896257) < 1e-15);
  CHECK(std::abs(r2.points[0] + 0.5773502691896257) < 1e-15);
  CHECK(std::abs(r2.weights[0] - 1.0) < 1e-15);

  auto r3 = gauss_legendre(3);
  double x4 = 0.0;
  for (std::size_t i = 0; i < r3.size(); ++i) x4 += r3.weights[i] * std::pow(r3.points[i], 4);
  CHECK(std::abs(x4 - 0.4) < 1e-15);

  CHECK_THROWS(gauss_legendre(0));
  CHECK_THROWS(gauss_legendre(65));
}

TEST_CASE("gauss nodes are legendre roots and rules are exact") {
  for (int m : {1, 2, 5, 13, 32, 64}) {
    auto r = gauss_legendre(m);
    double wsum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(r.weights[i] > 0.0);
      CHECK(std::abs(legendre(m, r.points[i])) < 1e-12);
      wsum += r.weights[i];
    }
    CHECK(std::abs(wsum - 2.0) < 1e-13);
    for (int k = 0; k <= 2 * m - 1 && k <= 40; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(s - exact) < 1e-13);
    }
  }
}

TEST_CASE("face rules") {
  auto f1 = tensor_face_rule(gauss_legendre(1));
  REQUIRE(f1.size() == 1);
  CHECK(f1.points[0][0] == 0.0);
  CHECK(f1.weights[0] == doctest::Approx(4.0));

  auto f2 = tensor_face_rule(gauss_legendre(2));
  REQUIRE(f2.size() == 4);
  for (double w : f2.weights) CHECK(std::abs(w - 1.0) < 1e-15);

  for (int m = 2; m <= 4; ++m) {
    auto f = tensor_face_rule(gauss_legendre(m));
    double s = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      s += f.weights[i] * f.points[i][0] * f.points[i][0] * f.points[i][1] * f.points[i][1];
      wsum += f.weights[i];
    }
    CHECK(std::abs(s - 4.0 / 9.0) < 1e-14);
    CHECK(std::abs(wsum - 4.0) < 1e-14);
  }
}

TEST_CASE("triangle rules") {
  auto t1 = triangle_tensor_rule(1);
  REQUIRE(t1.size() == 1);
  CHECK(t1.weights[0] == doctest::Approx(0.5));

  for (int order = 1; order <= kMaxTriangleOrder; ++order) {
    auto r = triangle_tensor_rule(order);
    double one = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      one += w;
    }
    CHECK(std::abs(one - 0.5) < 1e-14);
  }
  for (int order = 3; order <= 8; ++order) {
    auto r = triangle_tensor_rule(order);
    double xy = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) xy += r.weights[i] * r.points[i][0] * r.points[i][1];
    CHECK(std::abs(xy - 1.0 / 24.0) < 1e-15);
  }
  // total degree order-1: int s^a t^b = a! b! / (a + b + 2)!
  auto r = triangle_tensor_rule(5);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i)
        s += r.weights[i] * std::pow(r.points[i][0], a) * std::pow(r.points[i][1], b);
      CHECK(std::abs(s - std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3)) < 1e-15);
    }
}

TEST_CASE("sauter rules") {
  auto disjoint = sauter_rule(PairCase::disjoint, 3);
  auto tri = triangle_tensor_rule(3);
  CHECK(disjoint.size() == tri.size() * tri.size());

  for (auto c : {PairCase::common_vertex, PairCase::common_edge, PairCase::identical}) {
    auto rule = sauter_rule(c, 4);
    CHECK(rule.pair_case == c);
    double wsum = 0.0;
    for (const auto& p : rule.points) {
      CHECK(p.weight > 0.0);
      wsum += p.weight;
    }
    // measure of reference triangle x reference triangle
    CHECK(std::abs(wsum - 0.25) < 1e-13);
  }

  const Tri ref{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}};
  SUBCASE("identical self-convergence") {
    const double v5 = pair_value(sauter_rule(PairCase::identical, 5), ref, ref);
    const double v8 = pair_value(sauter_rule(PairCase::identical, 8), ref, ref);
    const double v10 = pair_value(sauter_rule(PairCase::identical, 10), ref, ref);
    // geometric in the order, roughly a factor 7 per point
    CHECK(std::abs(v5 - v10) / v10 < 1e-4);
    CHECK(std::abs(v8 - v10) / v10 < 1e-6);
  }
  SUBCASE("common vertex against refinement") {
    const Tri other{Vec3{0, 0, 0}, Vec3{-1, 0, 0.3}, Vec3{0, -1, 0.5}};
    const double v5 = pair_value(sauter_rule(PairCase::common_vertex, 5), ref, other);
    const double oracle = refined_common_vertex(ref, other, 9);
    CHECK(std::abs(v5 - oracle) / oracle < 1e-5);
  }
  SUBCASE("relabeling the free vertices") {
    const Tri a{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0.2, 0.9, 0.1}};
    const Tri b{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0.4, -0.8, 0.3}};
    const Tri b_swapped{b[1], b[0], b[2]};
    const Tri a_swapped{a[1], a[0], a[2]};
    const auto edge = sauter_rule(PairCase::common_edge, 5);
    const double ab = pair_value(edge, a, b);
    CHECK(std::abs(ab - pair_value(edge, a_swapped, b_swapped)) < 1e-6 * ab);
    const Tri c{Vec3{0, 0, 0}, Vec3{-0.7, 0.1, 0.4}, Vec3{-0.2, -1.0, 0.0}};
    const Tri c_swapped{c[0], c[2], c[1]};
    const auto vertex = sauter_rule(PairCase::common_vertex, 5);
    const double ac = pair_value(vertex, a, c);
    CHECK(std::abs(ac - pair_value(vertex, a, c_swapped)) < 1e-6 * ac);
  }
}
