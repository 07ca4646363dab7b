#include "grh/green.hpp"

#include <cmath>
#include <stdexcept>

#include "grh/kernel.hpp"
#include "grh/quadrature.hpp"

namespace grh {

GreenRule build_green_rule(const Box& box, int m, double delta_scale) {
  if (box.empty() || !(box.diam_inf() > 0.0)) throw std::invalid_argument("Green rule needs a box of positive diameter");
  if (!(delta_scale > 0.0)) throw std::invalid_argument("delta scale must be positive");
  const FaceRule face = tensor_face_rule(gauss_legendre(m));

  GreenRule rule;
  rule.box = box;
  rule.delta = delta_scale * box.diam_inf();
  for (int k = 0; k < 3; ++k) {
    rule.omega.lo[k] = box.lo[k] - rule.delta;
    rule.omega.hi[k] = box.hi[k] + rule.delta;
  }
  for (int k = 0; k < 3; ++k) {
    const int a = k == 0 ? 1 : 0;
    const int b = k == 2 ? 1 : 2;
    const double ha = 0.5 * rule.omega.extent(a);
    const double hb = 0.5 * rule.omega.extent(b);
    for (int side = 0; side < 2; ++side) {
      Vec3 normal{0.0, 0.0, 0.0};
      normal[k] = side == 0 ? -1.0 : 1.0;
      for (std::size_t mu = 0; mu < face.size(); ++mu) {
        Vec3 z{};
        z[k] = side == 0 ? rule.omega.lo[k] : rule.omega.hi[k];
        z[a] = rule.omega.center(a) + ha * face.points[mu][0];
        z[b] = rule.omega.center(b) + hb * face.points[mu][1];
        rule.points.push_back(z);
        rule.weights.push_back(face.weights[mu] * ha * hb);
        rule.normals.push_back(normal);
      }
    }
  }
  return rule;
}

SideIntegrals side_integrals(const FunctionSpace& space, const TriangleSamples& samples,
                             std::span<const std::size_t> indices, const GreenRule& rule, bool normal_derivative) {
  const std::size_t k = rule.size();
  SideIntegrals out{DenseMatrix(indices.size(), k), DenseMatrix(indices.size(), k)};
  for (std::size_t a = 0; a < indices.size(); ++a) {
    auto p = out.p.row(a);
    auto q = out.q.row(a);
    for_each_sample(space, samples, indices[a], [&](const Vec3& y, const Vec3& ny, double w) {
      for (std::size_t nu = 0; nu < k; ++nu) {
        const Vec3& z = rule.points[nu];
        const Vec3& nz = rule.normals[nu];
        if (normal_derivative) {
          p[nu] += w * eval_dg_dn_x(y, z, ny);
          q[nu] += w * eval_d2g_dnx_dny(y, z, ny, nz);
        } else {
          p[nu] += w * eval_g(y, z);
          q[nu] += w * eval_dg_dn_y(y, z, nz);
        }
      }
    });
    for (std::size_t nu = 0; nu < k; ++nu) {
      const double sw = std::sqrt(rule.weights[nu]);
      p[nu] *= sw;
      q[nu] *= sw;
    }
  }
  return out;
}

namespace {

DenseMatrix a_layout(const SideIntegrals& s, double delta) {
  const std::size_t k = s.p.cols();
  DenseMatrix out(s.p.rows(), 2 * k);
  for (std::size_t i = 0; i < s.p.rows(); ++i)
    for (std::size_t nu = 0; nu < k; ++nu) {
      out(i, nu) = s.p(i, nu);
      out(i, k + nu) = delta * s.q(i, nu);
    }
  return out;
}

DenseMatrix b_layout(const SideIntegrals& s, double delta) {
  const std::size_t k = s.p.cols();
  DenseMatrix out(s.p.rows(), 2 * k);
  for (std::size_t i = 0; i < s.p.rows(); ++i)
    for (std::size_t nu = 0; nu < k; ++nu) {
      out(i, nu) = s.q(i, nu);
      out(i, k + nu) = -s.p(i, nu) / delta;
    }
  return out;
}

bool column_derivative(const GalerkinOperator& op) { return op.layer() == LayerKind::double_layer; }

}  // namespace

DenseMatrix assemble_A_t(const GalerkinOperator& op, std::span<const std::size_t> rows, const GreenRule& rule) {
  return a_layout(side_integrals(op.row_space(), op.samples(), rows, rule, false), rule.delta);
}

DenseMatrix assemble_B_ts(const GalerkinOperator& op, std::span<const std::size_t> cols, const GreenRule& rule) {
  return b_layout(side_integrals(op.col_space(), op.samples(), cols, rule, column_derivative(op)), rule.delta);
}

DenseMatrix assemble_adjoint_A_s(const GalerkinOperator& op, std::span<const std::size_t> cols,
                                 const GreenRule& rule) {
  return a_layout(side_integrals(op.col_space(), op.samples(), cols, rule, column_derivative(op)), rule.delta);
}

GreenBlock green_block(const GalerkinOperator& op, const ClusterTree& rows, std::size_t t, const ClusterTree& cols,
                       std::size_t s, int m, double delta_scale) {
  const GreenRule rule = build_green_rule(rows.cluster(t).box, m, delta_scale);
  if (!(dist_inf(rows.cluster(t).box, cols.cluster(s).box) > rule.delta))
    throw std::invalid_argument("green_block: column cluster intersects the closed box omega_t");
  return {assemble_A_t(op, rows.indices(t), rule), assemble_B_ts(op, cols.indices(s), rule)};
}

}  // namespace grh
