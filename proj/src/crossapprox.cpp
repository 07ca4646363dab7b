#include "grh/crossapprox.hpp"

#include <cmath>
#include <stdexcept>

namespace grh {

CrossApprox aca_full_pivot(const DenseMatrix& x, double tol, std::size_t max_rank) {
  if (!(tol >= 0.0)) throw std::invalid_argument("ACA tolerance must be nonnegative");
  const std::size_t rows = x.rows();
  const std::size_t cols = x.cols();
  for (double v : x.values())
    if (!std::isfinite(v)) throw std::invalid_argument("ACA input has non-finite entries");

  CrossApprox out;
  const std::size_t limit = std::min({max_rank, rows, cols});
  DenseMatrix r = x;
  const double scale = max_abs(x);
  std::vector<std::vector<double>> cs;
  std::vector<std::vector<double>> ds;

  while (out.rank() < limit) {
    std::size_t pi = 0;
    std::size_t pj = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const auto row = r.row(i);
      for (std::size_t j = 0; j < cols; ++j)
        if (std::abs(row[j]) > best) {
          best = std::abs(row[j]);
          pi = i;
          pj = j;
        }
    }
    if (best == 0.0 || best <= tol * scale) break;

    const double pivot = r(pi, pj);
    std::vector<double> c(rows);
    std::vector<double> d(cols);
    for (std::size_t i = 0; i < rows; ++i) c[i] = r(i, pj) / pivot;
    for (std::size_t j = 0; j < cols; ++j) d[j] = r(pi, j);
    c[pi] = 1.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (c[i] == 0.0) continue;
      auto row = r.row(i);
      for (std::size_t j = 0; j < cols; ++j) row[j] -= c[i] * d[j];
    }
    for (std::size_t j = 0; j < cols; ++j) r(pi, j) = 0.0;
    for (std::size_t i = 0; i < rows; ++i) r(i, pj) = 0.0;

    out.pivot_rows.push_back(pi);
    out.pivot_cols.push_back(pj);
    cs.push_back(std::move(c));
    ds.push_back(std::move(d));
  }

  const std::size_t k = out.rank();
  out.c = DenseMatrix(rows, k);
  out.d = DenseMatrix(cols, k);
  for (std::size_t nu = 0; nu < k; ++nu) {
    for (std::size_t i = 0; i < rows; ++i) out.c(i, nu) = cs[nu][i];
    for (std::size_t j = 0; j < cols; ++j) out.d(j, nu) = ds[nu][j];
  }
  return out;
}

AlgebraicInterpolant build_interpolant(const CrossApprox& ca) {
  AlgebraicInterpolant out;
  out.pivots = ca.pivot_rows;
  out.pc = ca.c.select_rows(ca.pivot_rows);
  out.v = solve_unit_lower_right(out.pc, ca.c);
  return out;
}

double estimate_norm2(const DenseMatrix& a, int iterations) {
  if (iterations < 1) throw std::invalid_argument("power iteration needs at least one step");
  if (a.empty()) return 0.0;
  return power_iteration_norm2(DenseOperator(a), iterations);
}

}  // namespace grh
