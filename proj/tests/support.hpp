#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <vector>

#include "grh/bem.hpp"
#include "grh/densela.hpp"
#include "grh/geometry.hpp"

namespace grh::test {

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = u(rng);
  return a;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

inline std::shared_ptr<const TriangleMesh> sphere(int level) {
  return std::make_shared<const TriangleMesh>(generate_sphere(level));
}

inline double relative_difference(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

inline DenseMatrix sub_block(const DenseMatrix& a, std::span<const std::size_t> rows,
                             std::span<const std::size_t> cols) {
  DenseMatrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = a(rows[r], cols[c]);
  return out;
}

}  // namespace grh::test
