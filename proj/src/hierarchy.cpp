#include "grh/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <iterator>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "grh/green.hpp"
#include "grh/parallel.hpp"

namespace grh {

namespace {

std::vector<double> gather(std::span<const double> x, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = x[idx[k]];
  return out;
}

void scatter_add(double alpha, std::span<const double> v, std::span<const std::size_t> idx, std::span<double> y) {
  for (std::size_t k = 0; k < idx.size(); ++k) y[idx[k]] += alpha * v[k];
}

void check_lengths(const LinearOperator& op, std::span<const double> x, std::span<double> y, bool transposed) {
  const std::size_t nx = transposed ? op.rows() : op.cols();
  const std::size_t ny = transposed ? op.cols() : op.rows();
  if (x.size() != nx || y.size() != ny) throw std::invalid_argument("matvec: dimension mismatch");
}

std::vector<std::size_t> row_clusters_of_admissible(const BlockTree& blocks) {
  std::vector<std::size_t> out;
  for (std::size_t id : blocks.admissible_leaves()) out.push_back(blocks.block(id).row);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> to_global(std::span<const std::size_t> local, std::span<const std::size_t> indices) {
  std::vector<std::size_t> out(local.size());
  for (std::size_t k = 0; k < local.size(); ++k) out[k] = indices[local[k]];
  return out;
}

std::size_t green_rank(int m) { return static_cast<std::size_t>(12 * m * m); }

void fill_nearfield(const GalerkinOperator& op, const BlockTree& blocks, unsigned threads,
                    const std::function<void(std::size_t, DenseMatrix)>& store) {
  const auto& leaves = blocks.leaves();
  parallel_for(leaves.size(), threads, [&](std::size_t k) {
    const Block& b = blocks.block(leaves[k]);
    if (b.admissible) return;
    store(k, op.evaluate(blocks.row_tree().indices(b.row), blocks.col_tree().indices(b.col), EntryUse::nearfield));
  });
}

}  // namespace

// ---------------------------------------------------------------- HMatrix

HMatrix::HMatrix(std::shared_ptr<const BlockTree> blocks)
    : blocks_(std::move(blocks)), payloads_(blocks_->leaves().size()) {}

void HMatrix::set_lowrank(std::size_t leaf, LowRankBlock block) {
  const Block& b = blocks_->block(blocks_->leaves()[leaf]);
  if (!block.left || block.left->rows() != blocks_->row_tree().cluster(b.row).size() ||
      block.right_t.cols() != blocks_->col_tree().cluster(b.col).size() || block.left->cols() != block.right_t.rows())
    throw std::invalid_argument("low-rank payload shape mismatch");
  payloads_[leaf].lowrank = true;
  payloads_[leaf].factors = std::move(block);
  payloads_[leaf].dense = DenseMatrix();
}

void HMatrix::set_dense(std::size_t leaf, DenseMatrix block) {
  const Block& b = blocks_->block(blocks_->leaves()[leaf]);
  if (block.rows() != blocks_->row_tree().cluster(b.row).size() ||
      block.cols() != blocks_->col_tree().cluster(b.col).size())
    throw std::invalid_argument("dense payload shape mismatch");
  payloads_[leaf].lowrank = false;
  payloads_[leaf].factors = LowRankBlock{};
  payloads_[leaf].dense = std::move(block);
}

DenseMatrix HMatrix::block_dense(std::size_t leaf) const {
  const Payload& p = payloads_[leaf];
  if (!p.lowrank) return p.dense;
  return matmul(*p.factors.left, p.factors.right_t);
}

void HMatrix::apply(double alpha, std::span<const double> x, std::span<double> y) const {
  check_lengths(*this, x, y, false);
  const auto& leaves = blocks_->leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const Block& b = blocks_->block(leaves[k]);
    const auto ti = blocks_->row_tree().indices(b.row);
    const auto si = blocks_->col_tree().indices(b.col);
    const auto xs = gather(x, si);
    std::vector<double> yt(ti.size(), 0.0);
    const Payload& p = payloads_[k];
    if (p.lowrank) {
      std::vector<double> tmp(p.factors.rank(), 0.0);
      gemv(1.0, p.factors.right_t, xs, tmp);
      gemv(1.0, *p.factors.left, tmp, yt);
    } else {
      gemv(1.0, p.dense, xs, yt);
    }
    scatter_add(alpha, yt, ti, y);
  }
}

void HMatrix::apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const {
  check_lengths(*this, x, y, true);
  const auto& leaves = blocks_->leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const Block& b = blocks_->block(leaves[k]);
    const auto ti = blocks_->row_tree().indices(b.row);
    const auto si = blocks_->col_tree().indices(b.col);
    const auto xt = gather(x, ti);
    std::vector<double> ys(si.size(), 0.0);
    const Payload& p = payloads_[k];
    if (p.lowrank) {
      std::vector<double> tmp(p.factors.rank(), 0.0);
      gemv_transposed(1.0, *p.factors.left, xt, tmp);
      gemv_transposed(1.0, p.factors.right_t, tmp, ys);
    } else {
      gemv_transposed(1.0, p.dense, xt, ys);
    }
    scatter_add(alpha, ys, si, y);
  }
}

// ----------------------------------------------------------- ClusterBasis

DenseMatrix ClusterBasis::expand(std::size_t t) const {
  const Cluster& c = tree->cluster(t);
  if (c.is_leaf()) return leaf_v[t];
  const DenseMatrix upper = matmul(expand(c.sons[0]), transfer[t][0]);
  const DenseMatrix lower = matmul(expand(c.sons[1]), transfer[t][1]);
  DenseMatrix out(upper.rows() + lower.rows(), rank(t));
  for (std::size_t i = 0; i < upper.rows(); ++i) std::copy(upper.row(i).begin(), upper.row(i).end(), out.row(i).begin());
  for (std::size_t i = 0; i < lower.rows(); ++i)
    std::copy(lower.row(i).begin(), lower.row(i).end(), out.row(upper.rows() + i).begin());
  return out;
}

std::size_t ClusterBasis::bytes() const {
  std::size_t n = 0;
  for (const auto& v : leaf_v) n += v.size();
  for (const auto& e : transfer) n += e[0].size() + e[1].size();
  return n * sizeof(double);
}

ClusterBasis build_cluster_basis(std::shared_ptr<const ClusterTree> tree, const FactorRows& factor, double tol,
                                 std::size_t max_rank, unsigned threads) {
  ClusterBasis basis;
  basis.tree = tree;
  const std::size_t n = tree->cluster_count();
  basis.leaf_v.resize(n);
  basis.transfer.resize(n);
  basis.pivots.resize(n);
  basis.pc.resize(n);
  basis.local_norm.assign(n, 0.0);
  basis.norm_bound.assign(n, 0.0);
  basis.lambda_hat.assign(n, 1.0);

  std::vector<std::vector<std::size_t>> by_level(tree->depth() + 1);
  for (std::size_t t = 0; t < n; ++t) by_level[tree->cluster(t).level].push_back(t);

  for (std::size_t level = by_level.size(); level-- > 0;) {
    const auto& ids = by_level[level];
    parallel_for(ids.size(), threads, [&](std::size_t k) {
      const std::size_t t = ids[k];
      const Cluster& c = tree->cluster(t);
      std::vector<std::size_t> rows;
      if (c.is_leaf()) {
        const auto idx = tree->indices(t);
        rows.assign(idx.begin(), idx.end());
      } else {
        rows = basis.pivots[c.sons[0]];
        rows.insert(rows.end(), basis.pivots[c.sons[1]].begin(), basis.pivots[c.sons[1]].end());
      }
      const DenseMatrix a = factor(t, rows);
      const CrossApprox ca = aca_full_pivot(a, tol, max_rank);
      if (ca.rank() == 0 && max_abs(a) > 0.0)
        throw std::runtime_error("cross approximation of cluster " + std::to_string(t) + " returned rank 0");
      AlgebraicInterpolant ip = build_interpolant(ca);
      basis.pivots[t] = to_global(ca.pivot_rows, rows);
      basis.local_norm[t] = estimate_norm2(ip.v, 50);
      if (c.is_leaf()) {
        basis.norm_bound[t] = basis.local_norm[t];
        basis.leaf_v[t] = std::move(ip.v);
      } else {
        const std::size_t r0 = basis.pivots[c.sons[0]].size();
        const std::size_t r1 = basis.pivots[c.sons[1]].size();
        basis.transfer[t][0] = ip.v.row_range(0, r0);
        basis.transfer[t][1] = ip.v.row_range(r0, r1);
        basis.lambda_hat[t] = std::max(basis.norm_bound[c.sons[0]], basis.norm_bound[c.sons[1]]);
        basis.norm_bound[t] = basis.lambda_hat[t] * basis.local_norm[t];
      }
      basis.pc[t] = std::move(ip.pc);
    });
  }
  return basis;
}

FactorRows row_factor(const GalerkinOperator& op, const ClusterTree& tree, int m, double delta_scale) {
  return [&op, &tree, m, delta_scale](std::size_t t, std::span<const std::size_t> indices) {
    return assemble_A_t(op, indices, build_green_rule(tree.cluster(t).box, m, delta_scale));
  };
}

FactorRows column_factor(const GalerkinOperator& op, const ClusterTree& tree, int m, double delta_scale) {
  return [&op, &tree, m, delta_scale](std::size_t s, std::span<const std::size_t> indices) {
    return assemble_adjoint_A_s(op, indices, build_green_rule(tree.cluster(s).box, m, delta_scale));
  };
}

// --------------------------------------------------------------- H2Matrix

H2Matrix::H2Matrix(std::shared_ptr<const BlockTree> blocks, std::shared_ptr<const ClusterBasis> row_basis,
                   std::shared_ptr<const ClusterBasis> col_basis)
    : blocks_(std::move(blocks)),
      row_basis_(std::move(row_basis)),
      col_basis_(std::move(col_basis)),
      payloads_(blocks_->leaves().size()),
      coupling_(blocks_->leaves().size(), 0) {}

void H2Matrix::set_coupling(std::size_t leaf, DenseMatrix s) {
  const Block& b = blocks_->block(blocks_->leaves()[leaf]);
  if (!b.admissible || s.rows() != row_basis_->rank(b.row) || s.cols() != col_basis_->rank(b.col))
    throw std::invalid_argument("coupling payload shape mismatch");
  payloads_[leaf] = std::move(s);
  coupling_[leaf] = 1;
}

void H2Matrix::set_dense(std::size_t leaf, DenseMatrix block) {
  const Block& b = blocks_->block(blocks_->leaves()[leaf]);
  if (block.rows() != blocks_->row_tree().cluster(b.row).size() ||
      block.cols() != blocks_->col_tree().cluster(b.col).size())
    throw std::invalid_argument("dense payload shape mismatch");
  payloads_[leaf] = std::move(block);
  coupling_[leaf] = 0;
}

DenseMatrix H2Matrix::block_dense(std::size_t leaf) const {
  if (!coupling_[leaf]) return payloads_[leaf];
  const Block& b = blocks_->block(blocks_->leaves()[leaf]);
  return matmul_transposed(matmul(row_basis_->expand(b.row), payloads_[leaf]), col_basis_->expand(b.col));
}

namespace {

// x^_s = V_s^T x|s for every cluster, sons before parents.
std::vector<std::vector<double>> forward_sweep(const ClusterBasis& basis, std::span<const double> x) {
  const ClusterTree& tree = *basis.tree;
  std::vector<std::vector<double>> xhat(tree.cluster_count());
  for (std::size_t s : tree.postorder()) {
    const Cluster& c = tree.cluster(s);
    xhat[s].assign(basis.rank(s), 0.0);
    if (c.is_leaf()) {
      gemv_transposed(1.0, basis.leaf_v[s], gather(x, tree.indices(s)), xhat[s]);
    } else {
      gemv_transposed(1.0, basis.transfer[s][0], xhat[c.sons[0]], xhat[s]);
      gemv_transposed(1.0, basis.transfer[s][1], xhat[c.sons[1]], xhat[s]);
    }
  }
  return xhat;
}

// y|t += alpha V_t y^_t, parents before sons.
void backward_sweep(const ClusterBasis& basis, std::vector<std::vector<double>>& yhat, double alpha,
                    std::span<double> y) {
  const ClusterTree& tree = *basis.tree;
  const auto& order = tree.postorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t t = *it;
    const Cluster& c = tree.cluster(t);
    if (c.is_leaf()) {
      std::vector<double> yt(c.size(), 0.0);
      gemv(1.0, basis.leaf_v[t], yhat[t], yt);
      scatter_add(alpha, yt, tree.indices(t), y);
    } else {
      gemv(1.0, basis.transfer[t][0], yhat[t], yhat[c.sons[0]]);
      gemv(1.0, basis.transfer[t][1], yhat[t], yhat[c.sons[1]]);
    }
  }
}

}  // namespace

void H2Matrix::apply(double alpha, std::span<const double> x, std::span<double> y) const {
  check_lengths(*this, x, y, false);
  const auto xhat = forward_sweep(*col_basis_, x);
  std::vector<std::vector<double>> yhat(blocks_->row_tree().cluster_count());
  for (std::size_t t = 0; t < yhat.size(); ++t) yhat[t].assign(row_basis_->rank(t), 0.0);
  const auto& leaves = blocks_->leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const Block& b = blocks_->block(leaves[k]);
    if (coupling_[k]) {
      gemv(1.0, payloads_[k], xhat[b.col], yhat[b.row]);
    } else {
      const auto ti = blocks_->row_tree().indices(b.row);
      std::vector<double> yt(ti.size(), 0.0);
      gemv(1.0, payloads_[k], gather(x, blocks_->col_tree().indices(b.col)), yt);
      scatter_add(alpha, yt, ti, y);
    }
  }
  backward_sweep(*row_basis_, yhat, alpha, y);
}

void H2Matrix::apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const {
  check_lengths(*this, x, y, true);
  const auto xhat = forward_sweep(*row_basis_, x);
  std::vector<std::vector<double>> yhat(blocks_->col_tree().cluster_count());
  for (std::size_t s = 0; s < yhat.size(); ++s) yhat[s].assign(col_basis_->rank(s), 0.0);
  const auto& leaves = blocks_->leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const Block& b = blocks_->block(leaves[k]);
    if (coupling_[k]) {
      gemv_transposed(1.0, payloads_[k], xhat[b.row], yhat[b.col]);
    } else {
      const auto si = blocks_->col_tree().indices(b.col);
      std::vector<double> ys(si.size(), 0.0);
      gemv_transposed(1.0, payloads_[k], gather(x, blocks_->row_tree().indices(b.row)), ys);
      scatter_add(alpha, ys, si, y);
    }
  }
  backward_sweep(*col_basis_, yhat, alpha, y);
}

// --------------------------------------------------------------- builders

HMatrix build_h_green(const GalerkinOperator& op, std::shared_ptr<const BlockTree> blocks, const BuildOptions& opts) {
  HMatrix h(blocks);
  const ClusterTree& rows = blocks->row_tree();
  const ClusterTree& cols = blocks->col_tree();
  const auto clusters = row_clusters_of_admissible(*blocks);
  std::vector<std::shared_ptr<const DenseMatrix>> a(rows.cluster_count());
  std::vector<GreenRule> rules(rows.cluster_count());
  parallel_for(clusters.size(), opts.threads, [&](std::size_t k) {
    const std::size_t t = clusters[k];
    rules[t] = build_green_rule(rows.cluster(t).box, opts.m, opts.delta_scale);
    a[t] = std::make_shared<const DenseMatrix>(assemble_A_t(op, rows.indices(t), rules[t]));
  });
  const auto& leaves = blocks->leaves();
  parallel_for(leaves.size(), opts.threads, [&](std::size_t k) {
    const Block& b = blocks->block(leaves[k]);
    if (!b.admissible) return;
    const GreenRule& rule = rules[b.row];
    if (!(dist_inf(rows.cluster(b.row).box, cols.cluster(b.col).box) > rule.delta))
      throw std::invalid_argument("build_h_green: admissible block intersects omega_t; use a smaller delta scale");
    h.set_lowrank(k, LowRankBlock{a[b.row], assemble_B_ts(op, cols.indices(b.col), rule).transposed()});
  });
  fill_nearfield(op, *blocks, opts.threads, [&](std::size_t k, DenseMatrix d) { h.set_dense(k, std::move(d)); });
  return h;
}

HMatrix build_h_hybrid(const GalerkinOperator& op, std::shared_ptr<const BlockTree> blocks, const BuildOptions& opts) {
  HMatrix h(blocks);
  const ClusterTree& rows = blocks->row_tree();
  const ClusterTree& cols = blocks->col_tree();
  const auto clusters = row_clusters_of_admissible(*blocks);
  std::vector<std::shared_ptr<const DenseMatrix>> left(rows.cluster_count());
  std::vector<DenseMatrix> pc(rows.cluster_count());
  std::vector<std::vector<std::size_t>> pivots(rows.cluster_count());
  parallel_for(clusters.size(), opts.threads, [&](std::size_t k) {
    const std::size_t t = clusters[k];
    const GreenRule rule = build_green_rule(rows.cluster(t).box, opts.m, opts.delta_scale);
    const DenseMatrix a = assemble_A_t(op, rows.indices(t), rule);
    CrossApprox ca = aca_full_pivot(a, opts.tol, green_rank(opts.m));
    if (ca.rank() == 0 && max_abs(a) > 0.0)
      throw std::runtime_error("cross approximation of A_t returned rank 0; tolerance too large");
    pivots[t] = to_global(ca.pivot_rows, rows.indices(t));
    pc[t] = ca.c.select_rows(ca.pivot_rows);
    left[t] = std::make_shared<const DenseMatrix>(std::move(ca.c));
  });
  const auto& leaves = blocks->leaves();
  parallel_for(leaves.size(), opts.threads, [&](std::size_t k) {
    const Block& b = blocks->block(leaves[k]);
    if (!b.admissible) return;
    const DenseMatrix pg = op.evaluate(pivots[b.row], cols.indices(b.col), EntryUse::farfield);
    h.set_lowrank(k, LowRankBlock{left[b.row], forward_substitution(pc[b.row], pg)});
  });
  fill_nearfield(op, *blocks, opts.threads, [&](std::size_t k, DenseMatrix d) { h.set_dense(k, std::move(d)); });
  return h;
}

H2Matrix build_h2(const GalerkinOperator& op, std::shared_ptr<const BlockTree> blocks, const BuildOptions& opts) {
  if (!blocks->strict()) throw std::invalid_argument("build_h2 needs a strictly admissible block tree");
  const ClusterTree& rows = blocks->row_tree();
  const ClusterTree& cols = blocks->col_tree();
  auto row_basis = std::make_shared<const ClusterBasis>(
      build_cluster_basis(blocks->row_tree_ptr(), row_factor(op, rows, opts.m, opts.delta_scale), opts.tol,
                          green_rank(opts.m), opts.threads));
  auto col_basis = std::make_shared<const ClusterBasis>(
      build_cluster_basis(blocks->col_tree_ptr(), column_factor(op, cols, opts.m, opts.delta_scale), opts.tol,
                          green_rank(opts.m), opts.threads));
  H2Matrix h(blocks, row_basis, col_basis);
  const auto& leaves = blocks->leaves();
  parallel_for(leaves.size(), opts.threads, [&](std::size_t k) {
    const Block& b = blocks->block(leaves[k]);
    if (!b.admissible) return;
    h.set_coupling(k, op.evaluate(row_basis->pivots[b.row], col_basis->pivots[b.col], EntryUse::farfield));
  });
  fill_nearfield(op, *blocks, opts.threads, [&](std::size_t k, DenseMatrix d) { h.set_dense(k, std::move(d)); });
  return h;
}

PartialAca aca_partial(std::size_t rows, std::size_t cols,
                       const std::function<void(std::size_t, std::span<double>)>& row,
                       const std::function<void(std::size_t, std::span<double>)>& col, double eps) {
  std::vector<std::vector<double>> us;
  std::vector<std::vector<double>> vs;
  std::vector<char> used(rows, 0);
  const std::size_t max_rank = std::min(rows, cols);
  double frob2 = 0.0;
  std::size_t i = 0;
  while (us.size() < max_rank) {
    used[i] = 1;
    std::vector<double> r(cols, 0.0);
    row(i, r);
    for (std::size_t k = 0; k < us.size(); ++k)
      for (std::size_t j = 0; j < cols; ++j) r[j] -= us[k][i] * vs[k][j];
    std::size_t pj = 0;
    for (std::size_t j = 1; j < cols; ++j)
      if (std::abs(r[j]) > std::abs(r[pj])) pj = j;

    auto next_unused = [&](const std::vector<double>* score) {
      std::size_t best = rows;
      for (std::size_t a = 0; a < rows; ++a) {
        if (used[a]) continue;
        if (best == rows || (score && std::abs((*score)[a]) > std::abs((*score)[best]))) best = a;
      }
      return best;
    };

    if (r[pj] == 0.0) {
      // Zero remainder row: retry with the next unused row.
      i = next_unused(nullptr);
      if (i == rows) break;
      continue;
    }
    const double pivot = r[pj];
    for (double& v : r) v /= pivot;
    std::vector<double> c(rows, 0.0);
    col(pj, c);
    for (std::size_t k = 0; k < us.size(); ++k)
      for (std::size_t a = 0; a < rows; ++a) c[a] -= vs[k][pj] * us[k][a];

    const double cn = norm2(c);
    const double dn = norm2(r);
    double cross = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k) cross += dot(c, us[k]) * dot(r, vs[k]);
    frob2 += 2.0 * cross + cn * cn * dn * dn;
    us.push_back(std::move(c));
    vs.push_back(std::move(r));
    if (cn * dn <= eps * std::sqrt(std::max(frob2, 0.0))) break;
    i = next_unused(&us.back());
    if (i == rows) break;
  }
  PartialAca out{DenseMatrix(rows, us.size()), DenseMatrix(cols, us.size())};
  for (std::size_t k = 0; k < us.size(); ++k) {
    for (std::size_t a = 0; a < rows; ++a) out.c(a, k) = us[k][a];
    for (std::size_t j = 0; j < cols; ++j) out.d(j, k) = vs[k][j];
  }
  return out;
}

HMatrix build_h_aca_baseline(const GalerkinOperator& op, std::shared_ptr<const BlockTree> blocks,
                             const BuildOptions& opts) {
  HMatrix h(blocks);
  const ClusterTree& rows = blocks->row_tree();
  const ClusterTree& cols = blocks->col_tree();
  const auto& leaves = blocks->leaves();
  parallel_for(leaves.size(), opts.threads, [&](std::size_t k) {
    const Block& b = blocks->block(leaves[k]);
    if (!b.admissible) return;
    const auto ti = rows.indices(b.row);
    const auto si = cols.indices(b.col);
    auto row = [&](std::size_t i, std::span<double> out) {
      const std::size_t gi = ti[i];
      const DenseMatrix r = op.evaluate(std::span<const std::size_t>(&gi, 1), si, EntryUse::farfield);
      std::copy(r.values().begin(), r.values().end(), out.begin());
    };
    auto col = [&](std::size_t j, std::span<double> out) {
      const std::size_t gj = si[j];
      const DenseMatrix c = op.evaluate(ti, std::span<const std::size_t>(&gj, 1), EntryUse::farfield);
      std::copy(c.values().begin(), c.values().end(), out.begin());
    };
    PartialAca aca = aca_partial(ti.size(), si.size(), row, col, opts.eps_aca);
    h.set_lowrank(k, LowRankBlock{std::make_shared<const DenseMatrix>(std::move(aca.c)), aca.d.transposed()});
  });
  fill_nearfield(op, *blocks, opts.threads, [&](std::size_t k, DenseMatrix d) { h.set_dense(k, std::move(d)); });
  return h;
}

// ------------------------------------------------------------ diagnostics

namespace {

void finish_report(StorageReport& r, std::size_t ranks_sum, std::size_t ranks_count) {
  r.total_bytes = r.nearfield_bytes + r.farfield_bytes + r.basis_bytes;
  r.bytes_per_dof = r.dofs ? static_cast<double>(r.total_bytes) / static_cast<double>(r.dofs) : 0.0;
  r.mean_rank = ranks_count ? static_cast<double>(ranks_sum) / static_cast<double>(ranks_count) : 0.0;
}

}  // namespace

StorageReport storage_report(const HMatrix& h) {
  StorageReport r;
  r.dofs = h.rows();
  std::size_t sum = 0;
  std::size_t count = 0;
  const BlockTree& blocks = h.blocks();
  for (std::size_t k = 0; k < h.leaf_count(); ++k) {
    const Block& b = blocks.block(blocks.leaves()[k]);
    const std::size_t nt = blocks.row_tree().cluster(b.row).size();
    const std::size_t ns = blocks.col_tree().cluster(b.col).size();
    if (h.is_lowrank(k)) {
      const std::size_t rank = h.lowrank(k).rank();
      r.farfield_bytes += sizeof(double) * (nt + ns) * rank;
      ++r.rank_histogram[rank];
      r.max_rank = std::max(r.max_rank, rank);
      sum += rank;
      ++count;
    } else {
      r.nearfield_bytes += sizeof(double) * nt * ns;
    }
  }
  finish_report(r, sum, count);
  return r;
}

StorageReport storage_report(const H2Matrix& h) {
  StorageReport r;
  r.dofs = h.rows();
  r.basis_bytes = h.row_basis().bytes() + h.col_basis().bytes();
  for (std::size_t k = 0; k < h.leaf_count(); ++k) {
    const std::size_t bytes = sizeof(double) * h.payload(k).size();
    (h.is_coupling(k) ? r.farfield_bytes : r.nearfield_bytes) += bytes;
  }
  std::size_t sum = 0;
  const ClusterBasis& basis = h.row_basis();
  for (std::size_t t = 0; t < basis.pivots.size(); ++t) {
    const std::size_t rank = basis.rank(t);
    ++r.rank_histogram[rank];
    r.max_rank = std::max(r.max_rank, rank);
    sum += rank;
  }
  r.lambda_hat = basis.lambda_hat;
  r.norm_bound = basis.norm_bound;
  finish_report(r, sum, basis.pivots.size());
  return r;
}

double local_error_proxy(const ClusterBasis& basis, const GalerkinOperator& op, std::size_t t, std::size_t max_cols,
                         std::uint64_t seed) {
  const ClusterTree& tree = *basis.tree;
  const Cluster& c = tree.cluster(t);
  std::vector<std::size_t> far = farfield_indices(c.box, op.col_space().support_boxes());
  if (far.empty()) return 0.0;
  if (far.size() > max_cols) {
    std::vector<std::size_t> picked;
    std::mt19937_64 rng(seed);
    std::sample(far.begin(), far.end(), std::back_inserter(picked), max_cols, rng);
    far = std::move(picked);
  }
  std::vector<std::size_t> rows;
  DenseMatrix v;
  if (c.is_leaf()) {
    const auto idx = tree.indices(t);
    rows.assign(idx.begin(), idx.end());
    v = basis.leaf_v[t];
  } else {
    rows = basis.pivots[c.sons[0]];
    rows.insert(rows.end(), basis.pivots[c.sons[1]].begin(), basis.pivots[c.sons[1]].end());
    const auto& e0 = basis.transfer[t][0];
    const auto& e1 = basis.transfer[t][1];
    v = DenseMatrix(e0.rows() + e1.rows(), basis.rank(t));
    for (std::size_t i = 0; i < e0.rows(); ++i) std::copy(e0.row(i).begin(), e0.row(i).end(), v.row(i).begin());
    for (std::size_t i = 0; i < e1.rows(); ++i)
      std::copy(e1.row(i).begin(), e1.row(i).end(), v.row(e0.rows() + i).begin());
  }
  const DenseMatrix g = op.evaluate(rows, far, EntryUse::diagnostic);
  std::vector<std::size_t> local;
  for (std::size_t p : basis.pivots[t]) local.push_back(static_cast<std::size_t>(std::find(rows.begin(), rows.end(), p) - rows.begin()));
  const DenseMatrix err = g - matmul(v, g.select_rows(local));
  const double ref = frobenius_norm(g);
  return ref > 0.0 ? frobenius_norm(err) / ref : 0.0;
}

namespace {

template <class Hier>
DenseMatrix assemble_blocks(const Hier& h, const std::function<DenseMatrix(std::size_t)>& block) {
  const BlockTree& blocks = h.blocks();
  DenseMatrix out(h.rows(), h.cols());
  for (std::size_t k = 0; k < h.leaf_count(); ++k) {
    const Block& b = blocks.block(blocks.leaves()[k]);
    const auto ti = blocks.row_tree().indices(b.row);
    const auto si = blocks.col_tree().indices(b.col);
    const DenseMatrix d = block(k);
    for (std::size_t a = 0; a < ti.size(); ++a)
      for (std::size_t c = 0; c < si.size(); ++c) out(ti[a], si[c]) = d(a, c);
  }
  return out;
}

}  // namespace

DenseMatrix to_dense(const LinearOperator& op) {
  if (std::max(op.rows(), op.cols()) > kMaxDenseCompare)
    throw std::invalid_argument("dense expansion limited to " + std::to_string(kMaxDenseCompare) + " unknowns");
  if (const auto* h = dynamic_cast<const HMatrix*>(&op))
    return assemble_blocks(*h, [h](std::size_t k) { return h->block_dense(k); });
  if (const auto* h = dynamic_cast<const H2Matrix*>(&op)) {
    std::map<std::size_t, DenseMatrix> rows;
    std::map<std::size_t, DenseMatrix> cols;
    auto cached = [](std::map<std::size_t, DenseMatrix>& cache, const ClusterBasis& basis, std::size_t t) -> const DenseMatrix& {
      auto it = cache.find(t);
      if (it == cache.end()) it = cache.emplace(t, basis.expand(t)).first;
      return it->second;
    };
    return assemble_blocks(*h, [&](std::size_t k) {
      if (!h->is_coupling(k)) return h->payload(k);
      const Block& b = h->blocks().block(h->blocks().leaves()[k]);
      return matmul_transposed(matmul(cached(rows, h->row_basis(), b.row), h->payload(k)),
                               cached(cols, h->col_basis(), b.col));
    });
  }
  DenseMatrix out(op.rows(), op.cols());
  std::vector<double> e(op.cols(), 0.0);
  std::vector<double> y(op.rows());
  for (std::size_t j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    std::fill(y.begin(), y.end(), 0.0);
    op.apply(1.0, e, y);
    for (std::size_t i = 0; i < op.rows(); ++i) out(i, j) = y[i];
    e[j] = 0.0;
  }
  return out;
}

ErrorReport compare_dense(const LinearOperator& approx, const DenseMatrix& reference, int iterations) {
  if (approx.rows() != reference.rows() || approx.cols() != reference.cols())
    throw std::invalid_argument("compare_dense: dimension mismatch");
  const DenseMatrix a = to_dense(approx);
  ErrorReport r;
  const double ref_f = frobenius_norm(reference);
  r.rel_frobenius = ref_f > 0.0 ? frobenius_norm(a - reference) / ref_f : frobenius_norm(a);
  const DenseOperator ref_op(reference);
  const DifferenceOperator diff(approx, ref_op);
  const double ref_2 = power_iteration_norm2(ref_op, iterations);
  const double err_2 = power_iteration_norm2(diff, iterations);
  r.rel_spectral = ref_2 > 0.0 ? err_2 / ref_2 : err_2;
  return r;
}

}  // namespace grh
