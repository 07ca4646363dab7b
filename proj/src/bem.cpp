#include "grh/bem.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "grh/kernel.hpp"
#include "grh/parallel.hpp"

namespace grh {

namespace {

int local_index(const Triangle& tri, std::size_t vertex) {
  for (int k = 0; k < 3; ++k)
    if (tri[k] == vertex) return k;
  return -1;
}

}  // namespace

int shared_vertex_count(const Triangle& a, const Triangle& b) {
  int n = 0;
  for (std::size_t v : a)
    if (local_index(b, v) >= 0) ++n;
  return n;
}

FunctionSpace::FunctionSpace(std::shared_ptr<const TriangleMesh> mesh, SpaceKind kind)
    : mesh_(std::move(mesh)), kind_(kind) {
  const TriangleMesh& m = *mesh_;
  offsets_.push_back(0);
  if (kind_ == SpaceKind::constant) {
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
      pieces_.push_back({t, -1});
      offsets_.push_back(pieces_.size());
      boxes_.push_back(m.triangle_box(t));
    }
    return;
  }
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    Box box;
    for (std::size_t t : m.incident_triangles(v)) {
      pieces_.push_back({t, local_index(m.triangle(t), v)});
      box.extend(m.triangle_box(t));
    }
    if (box.empty()) box = Box::around(m.vertex(v));
    offsets_.push_back(pieces_.size());
    boxes_.push_back(box);
  }
}

TriangleSamples::TriangleSamples(const TriangleMesh& mesh, int order) : order_(order) {
  const TriangleRule rule = triangle_tensor_rule(order);
  per_triangle_ = rule.size();
  for (const auto& p : rule.points) barycentric_.push_back({1.0 - p[0] - p[1], p[0], p[1]});
  points_.reserve(per_triangle_ * mesh.triangle_count());
  weights_.reserve(per_triangle_ * mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto c = mesh.corners(t);
    const double jac = 2.0 * mesh.area(t);
    for (std::size_t q = 0; q < per_triangle_; ++q) {
      const auto& p = rule.points[q];
      points_.push_back(c[0] + p[0] * (c[1] - c[0]) + p[1] * (c[2] - c[0]));
      weights_.push_back(rule.weights[q] * jac);
    }
  }
}

GalerkinOperator::GalerkinOperator(std::shared_ptr<const TriangleMesh> mesh, LayerKind layer,
                                   QuadratureOrders orders)
    : mesh_(std::move(mesh)),
      layer_(layer),
      orders_(orders),
      row_space_(mesh_, SpaceKind::constant),
      col_space_(mesh_, layer == LayerKind::single_layer ? SpaceKind::constant : SpaceKind::linear),
      samples_(*mesh_, orders.regular) {
  for (auto c : {PairCase::common_vertex, PairCase::common_edge, PairCase::identical})
    pair_rules_[static_cast<int>(c)] = sauter_rule(c, orders.singular);
}

void GalerkinOperator::reset_counters() const {
  for (auto& c : counters_) c.store(0, std::memory_order_relaxed);
}

template <bool Weighted>
void GalerkinOperator::integrate_pair(std::size_t tx, std::size_t ty, std::array<double, 3>& out) const {
  out = {0.0, 0.0, 0.0};
  const TriangleMesh& m = *mesh_;
  const Vec3& ny = m.normal(ty);
  const bool slp = layer_ == LayerKind::single_layer;
  auto kernel = [&](const Vec3& x, const Vec3& y) { return slp ? eval_g(x, y) : eval_dg_dn_y(x, y, ny); };

  const Triangle& a = m.triangle(tx);
  const Triangle& b = m.triangle(ty);
  const int shared = shared_vertex_count(a, b);

  if (shared == 0) {
    const auto xs = samples_.points(tx);
    const auto wx = samples_.weights(tx);
    const auto ys = samples_.points(ty);
    const auto wy = samples_.weights(ty);
    const auto bary = samples_.barycentric();
    for (std::size_t p = 0; p < xs.size(); ++p) {
      std::array<double, 3> row{0.0, 0.0, 0.0};
      for (std::size_t q = 0; q < ys.size(); ++q) {
        const double v = wy[q] * kernel(xs[p], ys[q]);
        if constexpr (Weighted) {
          for (int k = 0; k < 3; ++k) row[k] += v * bary[q][k];
        } else {
          row[0] += v;
        }
      }
      for (int k = 0; k < 3; ++k) out[k] += wx[p] * row[k];
    }
    return;
  }

  // Shared corners first, in the same order on both triangles.
  std::array<int, 3> px{};
  std::array<int, 3> py{};
  int n = 0;
  for (int ia = 0; ia < 3; ++ia) {
    const int ib = local_index(b, a[ia]);
    if (ib >= 0) {
      px[n] = ia;
      py[n] = ib;
      ++n;
    }
  }
  int fx = n;
  int fy = n;
  for (int k = 0; k < 3; ++k) {
    if (local_index(b, a[k]) < 0) px[fx++] = k;
    if (local_index(a, b[k]) < 0) py[fy++] = k;
  }

  const auto cx = m.corners(tx);
  const auto cy = m.corners(ty);
  const Vec3 x0 = cx[px[0]], x1 = cx[px[1]] - x0, x2 = cx[px[2]] - x0;
  const Vec3 y0 = cy[py[0]], y1 = cy[py[1]] - y0, y2 = cy[py[2]] - y0;
  const double jac = 4.0 * m.area(tx) * m.area(ty);
  const PairCase pc = shared == 1 ? PairCase::common_vertex : shared == 2 ? PairCase::common_edge : PairCase::identical;
  for (const auto& q : pair_rules_[static_cast<int>(pc)].points) {
    const Vec3 x = x0 + q.x[0] * x1 + q.x[1] * x2;
    const Vec3 y = y0 + q.y[0] * y1 + q.y[1] * y2;
    const double v = jac * q.weight * kernel(x, y);
    if constexpr (Weighted) {
      out[py[0]] += v * (1.0 - q.y[0] - q.y[1]);
      out[py[1]] += v * q.y[0];
      out[py[2]] += v * q.y[1];
    } else {
      out[0] += v;
    }
  }
}

std::array<double, 3> GalerkinOperator::pair_integrals(std::size_t tx, std::size_t ty) const {
  std::array<double, 3> out{};
  integrate_pair<true>(tx, ty, out);
  return out;
}

double GalerkinOperator::pair_integral(std::size_t tx, std::size_t ty) const {
  // g is symmetric; a fixed argument order makes V exactly symmetric
  if (layer_ == LayerKind::single_layer && tx > ty) std::swap(tx, ty);
  std::array<double, 3> out{};
  integrate_pair<false>(tx, ty, out);
  return out[0];
}

double GalerkinOperator::entry(std::size_t i, std::size_t j, EntryUse use) const {
  if (i >= rows() || j >= cols()) throw std::out_of_range("Galerkin entry index out of range");
  count(use, 1);
  if (layer_ == LayerKind::single_layer) return pair_integral(i, j);
  double sum = 0.0;
  for (const auto& piece : col_space_.pieces(j)) sum += pair_integrals(i, piece.triangle)[piece.local];
  return sum;
}

void GalerkinOperator::evaluate(std::span<const std::size_t> row_ids, std::span<const std::size_t> col_ids,
                                DenseMatrix& out, EntryUse use) const {
  out = DenseMatrix(row_ids.size(), col_ids.size());
  for (std::size_t i : row_ids)
    if (i >= rows()) throw std::out_of_range("Galerkin row index out of range");
  for (std::size_t j : col_ids)
    if (j >= cols()) throw std::out_of_range("Galerkin column index out of range");
  count(use, static_cast<std::uint64_t>(row_ids.size()) * col_ids.size());

  if (layer_ == LayerKind::single_layer) {
    for (std::size_t a = 0; a < row_ids.size(); ++a)
      for (std::size_t b = 0; b < col_ids.size(); ++b) out(a, b) = pair_integral(row_ids[a], col_ids[b]);
    return;
  }

  // Integrate every (row triangle, incident triangle) pair once and
  // scatter the corner values to the vertex columns.
  std::vector<std::size_t> tris;
  for (std::size_t j : col_ids)
    for (const auto& piece : col_space_.pieces(j)) tris.push_back(piece.triangle);
  std::sort(tris.begin(), tris.end());
  tris.erase(std::unique(tris.begin(), tris.end()), tris.end());
  std::unordered_map<std::size_t, std::size_t> slot;
  slot.reserve(tris.size());
  for (std::size_t k = 0; k < tris.size(); ++k) slot.emplace(tris[k], k);

  std::vector<std::array<double, 3>> values(tris.size());
  for (std::size_t a = 0; a < row_ids.size(); ++a) {
    for (std::size_t k = 0; k < tris.size(); ++k) values[k] = pair_integrals(row_ids[a], tris[k]);
    for (std::size_t b = 0; b < col_ids.size(); ++b) {
      double sum = 0.0;
      for (const auto& piece : col_space_.pieces(col_ids[b])) sum += values[slot.at(piece.triangle)][piece.local];
      out(a, b) = sum;
    }
  }
}

DenseMatrix GalerkinOperator::evaluate(std::span<const std::size_t> row_ids, std::span<const std::size_t> col_ids,
                                       EntryUse use) const {
  DenseMatrix out;
  evaluate(row_ids, col_ids, out, use);
  return out;
}

DenseMatrix GalerkinOperator::assemble_dense(unsigned threads) const {
  DenseMatrix out(rows(), cols());
  std::vector<std::size_t> all_cols(cols());
  for (std::size_t j = 0; j < cols(); ++j) all_cols[j] = j;
  constexpr std::size_t chunk = 32;
  const std::size_t chunks = (rows() + chunk - 1) / chunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<std::size_t> row_ids;
    for (std::size_t i = c * chunk; i < std::min(rows(), (c + 1) * chunk); ++i) row_ids.push_back(i);
    const DenseMatrix part = evaluate(row_ids, all_cols, EntryUse::diagnostic);
    for (std::size_t a = 0; a < row_ids.size(); ++a)
      std::copy(part.row(a).begin(), part.row(a).end(), out.row(row_ids[a]).begin());
  });
  return out;
}

double mass_entry(const TriangleMesh& mesh, std::size_t triangle, std::size_t vertex) {
  return local_index(mesh.triangle(triangle), vertex) >= 0 ? mesh.area(triangle) / 3.0 : 0.0;
}

std::vector<double> mass_apply(const TriangleMesh& mesh, std::span<const double> beta) {
  if (beta.size() != mesh.vertex_count()) throw std::invalid_argument("mass_apply: length mismatch");
  std::vector<double> out(mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    out[t] = mesh.area(t) / 3.0 * (beta[tri[0]] + beta[tri[1]] + beta[tri[2]]);
  }
  return out;
}

DenseMatrix assemble_mass(const TriangleMesh& mesh) {
  DenseMatrix out(mesh.triangle_count(), mesh.vertex_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
    for (std::size_t v : mesh.triangle(t)) out(t, v) = mesh.area(t) / 3.0;
  return out;
}

}  // namespace grh
