#pragma once

// Galerkin discretization of the Laplace single and double layer
// operators: piecewise constant test functions on triangles, constant
// (single layer) or continuous piecewise linear (double layer) trial
// functions. Entries touching a common vertex use Sauter rules.

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "grh/densela.hpp"
#include "grh/geometry.hpp"
#include "grh/quadrature.hpp"
#include "grh/vec3.hpp"

namespace grh {

enum class SpaceKind { constant, linear };

/// Basis of piecewise constants (one per triangle) or nodal hat
/// functions (one per vertex).
class FunctionSpace {
 public:
  /// Restriction of a basis function to one triangle: the constant 1
  /// (local < 0) or the barycentric coordinate of corner `local`.
  struct Piece {
    std::size_t triangle;
    int local;
  };

  FunctionSpace(std::shared_ptr<const TriangleMesh> mesh, SpaceKind kind);

  [[nodiscard]] SpaceKind kind() const { return kind_; }
  [[nodiscard]] std::size_t size() const { return boxes_.size(); }
  [[nodiscard]] const TriangleMesh& mesh() const { return *mesh_; }
  [[nodiscard]] std::span<const Piece> pieces(std::size_t i) const {
    return {pieces_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// Bounding box of the support: the triangle, or the union of the
  /// triangles around the vertex.
  [[nodiscard]] const Box& support_box(std::size_t i) const { return boxes_[i]; }
  [[nodiscard]] const std::vector<Box>& support_boxes() const { return boxes_; }

 private:
  std::shared_ptr<const TriangleMesh> mesh_;
  SpaceKind kind_;
  std::vector<std::size_t> offsets_;
  std::vector<Piece> pieces_;
  std::vector<Box> boxes_;
};

/// Mapped quadrature points for every triangle of a mesh. Weights carry
/// the surface Jacobian, so they sum to the triangle area.
class TriangleSamples {
 public:
  TriangleSamples(const TriangleMesh& mesh, int order);

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] std::size_t points_per_triangle() const { return per_triangle_; }
  [[nodiscard]] std::span<const Vec3> points(std::size_t t) const {
    return {points_.data() + t * per_triangle_, per_triangle_};
  }
  [[nodiscard]] std::span<const double> weights(std::size_t t) const {
    return {weights_.data() + t * per_triangle_, per_triangle_};
  }
  /// Barycentric coordinates of the reference points (shared by all triangles).
  [[nodiscard]] std::span<const std::array<double, 3>> barycentric() const { return barycentric_; }

 private:
  int order_;
  std::size_t per_triangle_;
  std::vector<Vec3> points_;
  std::vector<double> weights_;
  std::vector<std::array<double, 3>> barycentric_;
};

/// Visits the quadrature points of basis function i: visit(y, n_y, w)
/// where w includes the basis function value.
template <class Visit>
void for_each_sample(const FunctionSpace& space, const TriangleSamples& samples, std::size_t i, Visit&& visit) {
  const auto bary = samples.barycentric();
  for (const auto& piece : space.pieces(i)) {
    const auto pts = samples.points(piece.triangle);
    const auto wts = samples.weights(piece.triangle);
    const Vec3& n = space.mesh().normal(piece.triangle);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const double value = piece.local < 0 ? 1.0 : bary[q][piece.local];
      visit(pts[q], n, wts[q] * value);
    }
  }
}

enum class LayerKind { single_layer, double_layer };

/// Tags for the evaluation counters.
enum class EntryUse { nearfield = 0, farfield = 1, diagnostic = 2 };

struct QuadratureOrders {
  int regular = 3;
  int singular = 5;
};

/// Entries g_ij = int phi_i(x) int k(x, y) psi_j(y) dy dx with
/// k = g (single layer) or k = dg/dn_y (double layer).
class GalerkinOperator {
 public:
  GalerkinOperator(std::shared_ptr<const TriangleMesh> mesh, LayerKind layer, QuadratureOrders orders = {});

  [[nodiscard]] std::size_t rows() const { return row_space_.size(); }
  [[nodiscard]] std::size_t cols() const { return col_space_.size(); }
  [[nodiscard]] LayerKind layer() const { return layer_; }
  [[nodiscard]] const QuadratureOrders& orders() const { return orders_; }
  [[nodiscard]] const TriangleMesh& mesh() const { return *mesh_; }
  [[nodiscard]] std::shared_ptr<const TriangleMesh> mesh_ptr() const { return mesh_; }
  [[nodiscard]] const FunctionSpace& row_space() const { return row_space_; }
  [[nodiscard]] const FunctionSpace& col_space() const { return col_space_; }
  /// Regular-order samples, also used for the Green factors.
  [[nodiscard]] const TriangleSamples& samples() const { return samples_; }

  double entry(std::size_t i, std::size_t j, EntryUse use = EntryUse::diagnostic) const;

  /// out(a, b) = g_{rows[a], cols[b]}; out is resized.
  void evaluate(std::span<const std::size_t> rows, std::span<const std::size_t> cols, DenseMatrix& out,
                EntryUse use) const;
  DenseMatrix evaluate(std::span<const std::size_t> rows, std::span<const std::size_t> cols, EntryUse use) const;

  DenseMatrix assemble_dense(unsigned threads = 1) const;

  /// int_{T_x} int_{T_y} k(x, y) lambda_k(y) dy dx for the three corners
  /// k of T_y, in T_y's own corner order.
  [[nodiscard]] std::array<double, 3> pair_integrals(std::size_t tx, std::size_t ty) const;
  /// int_{T_x} int_{T_y} k(x, y) dy dx
  [[nodiscard]] double pair_integral(std::size_t tx, std::size_t ty) const;

  [[nodiscard]] std::uint64_t evaluations(EntryUse use) const {
    return counters_[static_cast<int>(use)].load(std::memory_order_relaxed);
  }
  void reset_counters() const;

 private:
  void count(EntryUse use, std::uint64_t n) const {
    counters_[static_cast<int>(use)].fetch_add(n, std::memory_order_relaxed);
  }
  template <bool Weighted>
  void integrate_pair(std::size_t tx, std::size_t ty, std::array<double, 3>& out) const;

  std::shared_ptr<const TriangleMesh> mesh_;
  LayerKind layer_;
  QuadratureOrders orders_;
  FunctionSpace row_space_;
  FunctionSpace col_space_;
  TriangleSamples samples_;
  std::array<TrianglePairRule, 4> pair_rules_;
  mutable std::array<std::atomic<std::uint64_t>, 3> counters_{};
};

/// int phi_i psi_j = area_i / 3 if vertex j is a corner of triangle i.
double mass_entry(const TriangleMesh& mesh, std::size_t triangle, std::size_t vertex);
/// (M beta)_i for the triangle x vertex mass matrix.
std::vector<double> mass_apply(const TriangleMesh& mesh, std::span<const double> beta);
DenseMatrix assemble_mass(const TriangleMesh& mesh);

/// Number of vertices shared by two triangles.
int shared_vertex_count(const Triangle& a, const Triangle& b);

}  // namespace grh
