#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "grh/bem.hpp"
#include "grh/cluster.hpp"
#include "grh/crossapprox.hpp"
#include "grh/densela.hpp"

namespace grh {

struct BuildOptions {
  int m = 2;
  double delta_scale = 0.5;
  /// Relative tolerance of the cross approximation of the Green factors.
  double tol = 1e-5;
  /// Stopping parameter of the partial-pivot baseline.
  double eps_aca = 1e-5;
  unsigned threads = 1;
};

/// left * right_t; `left` may be shared by all blocks of a row cluster.
struct LowRankBlock {
  std::shared_ptr<const DenseMatrix> left;
  DenseMatrix right_t;
  [[nodiscard]] std::size_t rank() const { return right_t.rows(); }
};

/// Payload per block-tree leaf, indexed by the leaf's position in
/// BlockTree::leaves(). Blocks are stored in cluster order.
class HMatrix final : public LinearOperator {
 public:
  explicit HMatrix(std::shared_ptr<const BlockTree> blocks);

  [[nodiscard]] std::size_t rows() const override { return blocks_->row_tree().index_count(); }
  [[nodiscard]] std::size_t cols() const override { return blocks_->col_tree().index_count(); }
  void apply(double alpha, std::span<const double> x, std::span<double> y) const override;
  void apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const override;

  [[nodiscard]] const BlockTree& blocks() const { return *blocks_; }
  [[nodiscard]] std::size_t leaf_count() const { return payloads_.size(); }
  [[nodiscard]] bool is_lowrank(std::size_t leaf) const { return payloads_[leaf].lowrank; }
  [[nodiscard]] const LowRankBlock& lowrank(std::size_t leaf) const { return payloads_[leaf].factors; }
  [[nodiscard]] const DenseMatrix& dense(std::size_t leaf) const { return payloads_[leaf].dense; }
  /// Explicit block in cluster order.
  [[nodiscard]] DenseMatrix block_dense(std::size_t leaf) const;

  void set_lowrank(std::size_t leaf, LowRankBlock block);
  void set_dense(std::size_t leaf, DenseMatrix block);

 private:
  struct Payload {
    bool lowrank = false;
    LowRankBlock factors;
    DenseMatrix dense;
  };
  std::shared_ptr<const BlockTree> blocks_;
  std::vector<Payload> payloads_;
};

/// Nested cluster basis: explicit V_t at leaves, transfer matrices
/// E_{t'} (rank(t') x rank(t)) for the sons t' of every other cluster.
struct ClusterBasis {
  std::shared_ptr<const ClusterTree> tree;
  std::vector<DenseMatrix> leaf_v;
  std::vector<std::array<DenseMatrix, 2>> transfer;
  /// Global indices of the rows of P_t.
  std::vector<std::vector<std::size_t>> pivots;
  /// Unit lower triangular P_t C_t of the last cross approximation.
  std::vector<DenseMatrix> pc;
  /// ||V_t||_2 at leaves, ||V^_t||_2 elsewhere (power iteration).
  std::vector<double> local_norm;
  /// Bound on ||V_t||_2: the leaf value, max over sons times ||V^_t||_2.
  std::vector<double> norm_bound;
  /// 1 at leaves, max{||V_t1||_2, ||V_t2||_2} (bounded) elsewhere.
  std::vector<double> lambda_hat;

  [[nodiscard]] std::size_t rank(std::size_t t) const { return pivots[t].size(); }
  /// Explicit V_t, rows in cluster order.
  [[nodiscard]] DenseMatrix expand(std::size_t t) const;
  [[nodiscard]] std::size_t bytes() const;
};

/// Rows `indices` of the Green factor of cluster t.
using FactorRows = std::function<DenseMatrix(std::size_t cluster, std::span<const std::size_t> indices)>;

/// Leaves: full-pivot ACA of the factor rows of the cluster. Other
/// clusters: ACA of the factor rows at the stacked pivots of both sons.
ClusterBasis build_cluster_basis(std::shared_ptr<const ClusterTree> tree, const FactorRows& factor, double tol,
                                 std::size_t max_rank, unsigned threads = 1);

class H2Matrix final : public LinearOperator {
 public:
  H2Matrix(std::shared_ptr<const BlockTree> blocks, std::shared_ptr<const ClusterBasis> row_basis,
           std::shared_ptr<const ClusterBasis> col_basis);

  [[nodiscard]] std::size_t rows() const override { return blocks_->row_tree().index_count(); }
  [[nodiscard]] std::size_t cols() const override { return blocks_->col_tree().index_count(); }
  void apply(double alpha, std::span<const double> x, std::span<double> y) const override;
  void apply_transposed(double alpha, std::span<const double> x, std::span<double> y) const override;

  [[nodiscard]] const BlockTree& blocks() const { return *blocks_; }
  [[nodiscard]] const ClusterBasis& row_basis() const { return *row_basis_; }
  [[nodiscard]] const ClusterBasis& col_basis() const { return *col_basis_; }
  [[nodiscard]] std::size_t leaf_count() const { return payloads_.size(); }
  [[nodiscard]] bool is_coupling(std::size_t leaf) const { return coupling_[leaf] != 0; }
  /// Coupling matrix S_b or dense block of a leaf.
  [[nodiscard]] const DenseMatrix& payload(std::size_t leaf) const { return payloads_[leaf]; }
  [[nodiscard]] DenseMatrix block_dense(std::size_t leaf) const;

  void set_coupling(std::size_t leaf, DenseMatrix s);
  void set_dense(std::size_t leaf, DenseMatrix block);

 private:
  std::shared_ptr<const BlockTree> blocks_;
  std::shared_ptr<const ClusterBasis> row_basis_;
  std::shared_ptr<const ClusterBasis> col_basis_;
  std::vector<DenseMatrix> payloads_;
  std::vector<char> coupling_;
};

/// Admissible leaves hold (A_t, B_ts) of rank 2|K|.
HMatrix build_h_green(const GalerkinOperator& op, std::shared_ptr<const BlockTree> blocks, const BuildOptions& opts);
/// Admissible leaves hold (C_t, B~_ts) with (P_t C_t) B~_ts^T = P_t G|ts.
HMatrix build_h_hybrid(const GalerkinOperator& op, std::shared_ptr<const BlockTree> blocks, const BuildOptions& opts);
/// Nested bases from the Green factors, couplings S_b = G|pivots_t x pivots_s.
H2Matrix build_h2(const GalerkinOperator& op, std::shared_ptr<const BlockTree> blocks, const BuildOptions& opts);
/// Partial-pivot ACA on the Galerkin entries of each admissible block.
HMatrix build_h_aca_baseline(const GalerkinOperator& op, std::shared_ptr<const BlockTree> blocks,
                             const BuildOptions& opts);

/// Row-side and column-side factor callbacks used by build_h2.
FactorRows row_factor(const GalerkinOperator& op, const ClusterTree& tree, int m, double delta_scale);
FactorRows column_factor(const GalerkinOperator& op, const ClusterTree& tree, int m, double delta_scale);

/// Partial-pivot ACA of one block given row/column evaluators; stops when
/// ||c_k|| ||d_k|| <= eps ||C D^T||_F. Block ~ c * d^T.
struct PartialAca {
  DenseMatrix c;
  DenseMatrix d;
  [[nodiscard]] std::size_t rank() const { return c.cols(); }
};
PartialAca aca_partial(std::size_t rows, std::size_t cols, const std::function<void(std::size_t, std::span<double>)>& row,
                       const std::function<void(std::size_t, std::span<double>)>& col, double eps);

struct StorageReport {
  std::size_t dofs = 0;
  std::size_t total_bytes = 0;
  std::size_t nearfield_bytes = 0;
  std::size_t farfield_bytes = 0;
  std::size_t basis_bytes = 0;
  double bytes_per_dof = 0.0;
  std::map<std::size_t, std::size_t> rank_histogram;
  std::size_t max_rank = 0;
  double mean_rank = 0.0;
  std::vector<double> lambda_hat;
  std::vector<double> norm_bound;
};

/// Low-rank blocks are counted as 8 (|t|+|s|) k bytes each.
StorageReport storage_report(const HMatrix& h);
/// Leaf bases, transfer and coupling matrices, dense blocks.
StorageReport storage_report(const H2Matrix& h);

/// Relative error of the interpolation of cluster t on a random subset
/// of at most max_cols farfield columns: the leaf error
/// ||G|t x F - V_t P_t G|t x F|| or, for clusters with sons, the error
/// of V^_t on the sons' pivot rows. Frobenius norms; evaluations are
/// counted as diagnostic.
double local_error_proxy(const ClusterBasis& basis, const GalerkinOperator& op, std::size_t t, std::size_t max_cols,
                         std::uint64_t seed);

struct ErrorReport {
  double rel_frobenius = 0.0;
  double rel_spectral = 0.0;
};

constexpr std::size_t kMaxDenseCompare = 8192;

/// Explicit matrix by applying the operator to unit vectors.
DenseMatrix to_dense(const LinearOperator& op);
ErrorReport compare_dense(const LinearOperator& approx, const DenseMatrix& reference, int iterations = 100);

}  // namespace grh
