#pragma once

// Direct formulation of the interior Dirichlet problem:
//   V alpha = (K + M/2) beta,
// alpha the Neumann data in piecewise constants, beta the L2 projection
// of the Dirichlet data onto piecewise linears.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "grh/densela.hpp"
#include "grh/geometry.hpp"
#include "grh/vec3.hpp"

namespace grh {

struct HarmonicTestCase {
  std::string name;
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;

  /// "f1": x1^2 - x3^2; "f2", "f3": point sources at (1.2, 1.2, 1.2) and
  /// (1.0, 0.25, 1.0). Throws std::invalid_argument for other names.
  static HarmonicTestCase make(std::string_view name);
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  [[nodiscard]] const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

/// Conjugate gradients from a zero start until ||r|| <= tol ||b||. Throws
/// SolverError when max_iterations is reached.
CgResult conjugate_gradient(const ApplyFn& apply, std::span<const double> b, double tol, int max_iterations);

/// y = G x for the Gram matrix of the piecewise linear basis.
void linear_gram_apply(const TriangleMesh& mesh, std::span<const double> x, std::span<double> y);

/// Coefficients of the L2 projection onto piecewise linears; the right
/// side uses the triangle rule of the given order, the Gram system is
/// solved to 1e-12.
std::vector<double> l2_projection(const TriangleMesh& mesh, const std::function<double(const Vec3&)>& f,
                                  int order = 5);

struct DirichletSolution {
  std::vector<double> alpha;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// CG on V with relative residual tol; V and K may be dense or compressed.
DirichletSolution solve_dirichlet(const LinearOperator& v, const LinearOperator& k, const TriangleMesh& mesh,
                                  std::span<const double> beta, double tol = 1e-8);

/// sqrt(int (df/dn - sum alpha_i phi_i)^2), flat triangle normals.
double neumann_l2_error(const TriangleMesh& mesh, std::span<const double> alpha, const HarmonicTestCase& c,
                        int order = 5);

}  // namespace grh
