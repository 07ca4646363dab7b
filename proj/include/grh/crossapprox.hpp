#pragma once

#include <cstddef>
#include <vector>

#include "grh/densela.hpp"

namespace grh {

/// X ~ C D^T from pivot crosses. Column nu of C is the remainder column
/// j_nu divided by the pivot value, so (P C) is unit lower triangular.
struct CrossApprox {
  std::vector<std::size_t> pivot_rows;
  std::vector<std::size_t> pivot_cols;
  DenseMatrix c;
  DenseMatrix d;
  [[nodiscard]] std::size_t rank() const { return pivot_rows.size(); }
};

/// Full pivoting on an explicit remainder. Stops when
/// max|remainder| <= tol * max|X|, at max_rank, or at a zero remainder.
/// Ties pick the smallest row, then the smallest column.
CrossApprox aca_full_pivot(const DenseMatrix& x, double tol, std::size_t max_rank);

/// V = C (P C)^{-1}; the interpolation operator is V P.
struct AlgebraicInterpolant {
  std::vector<std::size_t> pivots;
  DenseMatrix v;
  DenseMatrix pc;
  [[nodiscard]] std::size_t rank() const { return pivots.size(); }
};

AlgebraicInterpolant build_interpolant(const CrossApprox& ca);

/// ||A||_2 by power iteration on A^T A with a fixed seed.
double estimate_norm2(const DenseMatrix& a, int iterations = 50);

}  // namespace grh
