#pragma once

// Quadrature of Green's representation formula on the boundary of the
// inflated box omega_t. For x in B_t and y outside omega_t,
//   g(x, y) ~ sum_nu w_nu [ g(x, z_nu) dg/dn(z_nu, y) - dg/dn(x, z_nu) g(z_nu, y) ],
// which splits a kernel block into A_t B_ts^T of rank 2|K|.

#include <cstddef>
#include <span>
#include <vector>

#include "grh/bem.hpp"
#include "grh/cluster.hpp"
#include "grh/densela.hpp"
#include "grh/vec3.hpp"

namespace grh {

struct GreenRule {
  Box box;
  Box omega;
  double delta = 0.0;
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::vector<Vec3> normals;
  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// delta = delta_scale * diam(box); six faces of omega (x, y, z axis, minus
/// face before plus face), each with the m x m tensor Gauss rule.
GreenRule build_green_rule(const Box& box, int m, double delta_scale);

/// p(a, nu) = sqrt(w_nu) int b(y) D g(y, z_nu) dy and
/// q(a, nu) = sqrt(w_nu) int b(y) D dg/dn_nu(y, z_nu) dy for the basis
/// functions b = basis[indices[a]], with D the identity or, if
/// `normal_derivative`, the derivative along the surface normal at y.
struct SideIntegrals {
  DenseMatrix p;
  DenseMatrix q;
};

SideIntegrals side_integrals(const FunctionSpace& space, const TriangleSamples& samples,
                             std::span<const std::size_t> indices, const GreenRule& rule, bool normal_derivative);

/// [p, delta q] for the test functions (rows) of `op`: |rows| x 2|K|.
DenseMatrix assemble_A_t(const GalerkinOperator& op, std::span<const std::size_t> rows, const GreenRule& rule);

/// [q, -p / delta] for the trial functions (columns) of `op` against the
/// rule of a row cluster: |cols| x 2|K|.
DenseMatrix assemble_B_ts(const GalerkinOperator& op, std::span<const std::size_t> cols, const GreenRule& rule);

/// Column-side analogue of A_t, for the rule of a column cluster: the
/// Green expansion taken in the trial variable. |cols| x 2|K|.
DenseMatrix assemble_adjoint_A_s(const GalerkinOperator& op, std::span<const std::size_t> cols,
                                 const GreenRule& rule);

struct GreenBlock {
  DenseMatrix a;
  DenseMatrix b;
};

/// G|t x s ~ a b^T. Requires dist(B_t, B_s) > delta_t, i.e. B_s outside
/// the closed box omega_t; throws std::invalid_argument otherwise.
GreenBlock green_block(const GalerkinOperator& op, const ClusterTree& rows, std::size_t t, const ClusterTree& cols,
                       std::size_t s, int m, double delta_scale);

}  // namespace grh
