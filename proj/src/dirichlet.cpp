#include "grh/dirichlet.hpp"

#include <cmath>
#include <utility>

#include "grh/bem.hpp"
#include "grh/kernel.hpp"

namespace grh {

namespace {

HarmonicTestCase point_source(std::string name, const Vec3& p) {
  HarmonicTestCase c;
  c.name = std::move(name);
  c.value = [p](const Vec3& x) { return eval_g(x, p); };
  // grad_x 1/(4 pi |x - p|) = -(x - p) / (4 pi |x - p|^3)
  c.gradient = [p](const Vec3& x) {
    const Vec3 d = x - p;
    const double r = norm2(d);
    return (-kInvFourPi / (r * r * r)) * d;
  };
  return c;
}

}  // namespace

HarmonicTestCase HarmonicTestCase::make(std::string_view name) {
  if (name == "f1") {
    HarmonicTestCase c;
    c.name = "f1";
    c.value = [](const Vec3& x) { return x[0] * x[0] - x[2] * x[2]; };
    c.gradient = [](const Vec3& x) { return Vec3{2.0 * x[0], 0.0, -2.0 * x[2]}; };
    return c;
  }
  if (name == "f2") return point_source("f2", {1.2, 1.2, 1.2});
  if (name == "f3") return point_source("f3", {1.0, 0.25, 1.0});
  throw std::invalid_argument("unknown test case '" + std::string(name) + "' (expected f1, f2 or f3)");
}

CgResult conjugate_gradient(const ApplyFn& apply, std::span<const double> b, double tol, int max_iterations) {
  const std::size_t n = b.size();
  CgResult out;
  out.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return out;

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> p = r;
  std::vector<double> ap(n);
  double rr = dot(r, r);
  out.history.push_back(1.0);
  for (int it = 1; it <= max_iterations; ++it) {
    std::fill(ap.begin(), ap.end(), 0.0);
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw SolverError("conjugate gradients: operator not positive definite", out.history);
    const double step = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    const double rr_new = dot(r, r);
    out.iterations = it;
    out.relative_residual = std::sqrt(rr_new) / bnorm;
    out.history.push_back(out.relative_residual);
    if (out.relative_residual <= tol) return out;
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  throw SolverError("conjugate gradients did not converge in " + std::to_string(max_iterations) + " iterations",
                    out.history);
}

void linear_gram_apply(const TriangleMesh& mesh, std::span<const double> x, std::span<double> y) {
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    const double s = mesh.area(t) / 12.0;
    const double sum = x[tri[0]] + x[tri[1]] + x[tri[2]];
    for (int k = 0; k < 3; ++k) y[tri[k]] += s * (sum + x[tri[k]]);
  }
}

std::vector<double> l2_projection(const TriangleMesh& mesh, const std::function<double(const Vec3&)>& f, int order) {
  const TriangleSamples samples(mesh, order);
  const auto bary = samples.barycentric();
  std::vector<double> rhs(mesh.vertex_count(), 0.0);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto pts = samples.points(t);
    const auto wts = samples.weights(t);
    const auto& tri = mesh.triangle(t);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const double v = wts[q] * f(pts[q]);
      for (int k = 0; k < 3; ++k) rhs[tri[k]] += v * bary[q][k];
    }
  }
  auto gram = [&mesh](std::span<const double> x, std::span<double> y) { linear_gram_apply(mesh, x, y); };
  return conjugate_gradient(gram, rhs, 1e-12, 10 * static_cast<int>(mesh.vertex_count()) + 100).x;
}

DirichletSolution solve_dirichlet(const LinearOperator& v, const LinearOperator& k, const TriangleMesh& mesh,
                                  std::span<const double> beta, double tol) {
  if (v.rows() != mesh.triangle_count() || v.cols() != mesh.triangle_count() || k.rows() != mesh.triangle_count() ||
      k.cols() != mesh.vertex_count() || beta.size() != mesh.vertex_count())
    throw std::invalid_argument("solve_dirichlet: dimension mismatch");
  std::vector<double> rhs = mass_apply(mesh, beta);
  for (double& r : rhs) r *= 0.5;
  k.apply(1.0, beta, rhs);
  auto apply = [&v](std::span<const double> x, std::span<double> y) { v.apply(1.0, x, y); };
  CgResult cg = conjugate_gradient(apply, rhs, tol, 10 * static_cast<int>(v.rows()) + 100);
  return {std::move(cg.x), cg.iterations, cg.relative_residual};
}

double neumann_l2_error(const TriangleMesh& mesh, std::span<const double> alpha, const HarmonicTestCase& c,
                        int order) {
  if (alpha.size() != mesh.triangle_count()) throw std::invalid_argument("neumann_l2_error: length mismatch");
  const TriangleSamples samples(mesh, order);
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto pts = samples.points(t);
    const auto wts = samples.weights(t);
    const Vec3& n = mesh.normal(t);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const double e = dot(c.gradient(pts[q]), n) - alpha[t];
      sum += wts[q] * e * e;
    }
  }
  return std::sqrt(sum);
}

}  // namespace grh
