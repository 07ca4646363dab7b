// Acceptance driver: one PASS/FAIL line per criterion.
//   acceptance [--only C5 --only C7]

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grh/dirichlet.hpp"
#include "grh/green.hpp"
#include "grh/pipeline.hpp"
#include "grh/quadrature.hpp"
#include "support.hpp"

using namespace grh;
using grh::test::sphere;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

BuildOptions options(int m, double tol, double ds) {
  BuildOptions b;
  b.m = m;
  b.tol = tol;
  b.eps_aca = tol;
  b.delta_scale = ds;
  return b;
}

std::vector<std::size_t> sample_admissible(const BlockTree& bt, std::size_t count, std::uint64_t seed,
                                           std::size_t min_rows = 0) {
  std::vector<std::size_t> leaves;
  for (std::size_t k = 0; k < bt.leaves().size(); ++k) {
    const Block& b = bt.block(bt.leaves()[k]);
    if (b.admissible && bt.row_tree().cluster(b.row).size() > min_rows) leaves.push_back(k);
  }
  std::vector<std::size_t> picked;
  std::mt19937_64 rng(seed);
  std::sample(leaves.begin(), leaves.end(), std::back_inserter(picked), count, rng);
  return picked;
}

DenseMatrix exact_block(const GalerkinOperator& op, const BlockTree& bt, std::size_t leaf) {
  const Block& b = bt.block(bt.leaves()[leaf]);
  return op.evaluate(bt.row_tree().indices(b.row), bt.col_tree().indices(b.col), EntryUse::diagnostic);
}

DenseMatrix expand(const ClusterBasis& basis, std::size_t t) {
  const Cluster& c = basis.tree->cluster(t);
  if (c.is_leaf()) return basis.leaf_v[t];
  DenseMatrix out(c.size(), basis.rank(t));
  std::size_t offset = 0;
  for (int k = 0; k < 2; ++k) {
    const DenseMatrix part = matmul(expand(basis, c.sons[k]), basis.transfer[t][k]);
    for (std::size_t i = 0; i < part.rows(); ++i)
      for (std::size_t j = 0; j < part.cols(); ++j) out(offset + i, j) = part(i, j);
    offset += part.rows();
  }
  return out;
}

Outcome c1_quadrature() {
  double worst = 0.0;
  for (int m = 1; m <= 8; ++m) {
    const FaceRule rule = tensor_face_rule(gauss_legendre(m));
    auto exact = [](int a) { return a % 2 ? 0.0 : 2.0 / (a + 1); };
    for (int a = 0; a <= 2 * m - 1; ++a)
      for (int b = 0; b <= 2 * m - 1; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
          s += rule.weights[q] * std::pow(rule.points[q][0], a) * std::pow(rule.points[q][1], b);
        worst = std::max(worst, std::abs(s - exact(a) * exact(b)));
      }
  }
  return {worst <= 1e-12, fmt("max abs error %.2e over m=1..8 (limit 1e-12)", worst)};
}

Outcome c2_green_decay() {
  const GalerkinOperator op(sphere(3), LayerKind::single_layer);
  const auto blocks = build_trees(op, {1.0, 16});
  bool monotone = true;
  double log_sum = 0.0;
  int steps = 0;
  for (std::size_t k : sample_admissible(*blocks, 10, 2)) {
    const Block& b = blocks->block(blocks->leaves()[k]);
    const DenseMatrix exact = exact_block(op, *blocks, k);
    const double norm = estimate_norm2(exact, 100);
    double previous = 0.0;
    for (int m = 2; m <= 6; ++m) {
      const auto gb = green_block(op, blocks->row_tree(), b.row, blocks->col_tree(), b.col, m, 0.5);
      const double e = spectral_error(matmul_transposed(gb.a, gb.b), exact, 100) / norm;
      if (m > 2) {
        monotone = monotone && e < previous;
        log_sum += std::log(e / previous);
        ++steps;
      }
      previous = e;
    }
  }
  const double gm = std::exp(log_sum / steps);
  return {monotone && gm <= 0.8,
          fmt("10 blocks, strictly decreasing %s, geometric-mean ratio %.3f (limit 0.8)", monotone ? "yes" : "no", gm)};
}

Outcome c3_aca_rank() {
  std::mt19937_64 rng(3);
  bool ranks = true;
  double worst = 0.0;
  int cases = 0;
  for (std::size_t r = 1; r <= 8; ++r)
    for (std::size_t rows : {8u, 24u, 64u})
      for (std::size_t cols : {16u, 64u}) {
        if (r > std::min(rows, cols)) continue;
        const DenseMatrix x =
            matmul(grh::test::random_matrix(rows, r, rng), grh::test::random_matrix(r, cols, rng));
        const auto ca = aca_full_pivot(x, 1e-12, 64);
        ranks = ranks && ca.rank() == r;
        worst = std::max(worst, frobenius_norm(x - matmul_transposed(ca.c, ca.d)) / frobenius_norm(x));
        ++cases;
      }
  return {ranks && worst <= 1e-10,
          fmt("%d matrices, ranks recovered %s, max rel error %.2e (limit 1e-10)", cases, ranks ? "yes" : "no", worst)};
}

Outcome c4_identities() {
  const GalerkinOperator op(sphere(4), LayerKind::single_layer);
  const auto opts = options(2, 1e-4, 0.5);
  const auto blocks = build_trees(op, {1.0, 16});
  std::set<std::size_t> clusters;
  for (std::size_t id : blocks->admissible_leaves()) clusters.insert(blocks->block(id).row);
  double proj = 0.0;
  for (std::size_t t : clusters) {
    const auto rule = build_green_rule(blocks->row_tree().cluster(t).box, opts.m, opts.delta_scale);
    const auto ca = aca_full_pivot(assemble_A_t(op, blocks->row_tree().indices(t), rule), opts.tol, 12 * opts.m * opts.m);
    const auto ip = build_interpolant(ca);
    const DenseMatrix jc = matmul(ip.v, ca.c.select_rows(ip.pivots));
    proj = std::max(proj, frobenius_norm(jc - ca.c) / frobenius_norm(ca.c));
  }

  const auto c = compress(op, Method::h2, {1.0, 16}, opts);
  double nest = 0.0;
  for (const ClusterBasis* basis : {&c.h2matrix()->row_basis(), &c.h2matrix()->col_basis()}) {
    const ClusterTree& tree = *basis->tree;
    for (std::size_t t = 0; t < tree.cluster_count(); ++t) {
      const Cluster& cl = tree.cluster(t);
      if (cl.is_leaf()) continue;
      const DenseMatrix v = basis->expand(t);
      const double scale = 1.0 + frobenius_norm(v);
      std::size_t offset = 0;
      for (int k = 0; k < 2; ++k) {
        const DenseMatrix son = matmul(expand(*basis, cl.sons[k]), basis->transfer[t][k]);
        nest = std::max(nest, frobenius_norm(v.row_range(offset, son.rows()) - son) / scale);
        offset += son.rows();
      }
    }
  }
  return {proj <= 1e-12 && nest <= 1e-12,
          fmt("level 4: max |J C - C|/|C| %.2e over %zu clusters, nestedness %.2e (limit 1e-12)", proj,
              clusters.size(), nest)};
}

Outcome c5_dense() {
  const GalerkinOperator op(sphere(4), LayerKind::single_layer);
  const DenseMatrix dense = op.assemble_dense();
  const auto opts = options(3, 1e-5, 0.5);
  const double e_h2 = compare_dense(*compress(op, Method::h2, {1.0, 16}, opts).op, dense).rel_frobenius;
  const double e_hy = compare_dense(*compress(op, Method::hybrid, {1.0, 16}, opts).op, dense).rel_frobenius;
  return {e_h2 <= 1e-3 && e_hy <= 2.0 * e_h2,
          fmt("n=2048: H2 %.2e (limit 1e-3), hybrid %.2e (limit 2x H2 = %.2e)", e_h2, e_hy, 2.0 * e_h2)};
}

Outcome c6_dirichlet() {
  // f2, f3 carry the 1/(4 pi) factor; the tabulated values do not
  const std::map<std::string, std::pair<double, double>> table{
      {"f1", {1.3e-1, 6.3e-2}}, {"f2", {2.4e-2, 1.2e-2}}, {"f3", {1.8e-1, 9.0e-2}}};
  std::map<std::string, std::array<double, 2>> eps;
  const auto opts = options(2, 5e-4, 1.0);
  for (int level : {4, 5}) {
    const auto mesh = sphere(level);
    const GalerkinOperator v(mesh, LayerKind::single_layer), k(mesh, LayerKind::double_layer);
    const auto cv = compress(v, Method::h2, {2.0, 16}, opts);
    const auto ck = compress(k, Method::h2, {2.0, 16}, opts);
    for (const auto& [name, ref] : table) {
      const auto c = HarmonicTestCase::make(name);
      const auto sol = solve_dirichlet(*cv.op, *ck.op, *mesh, l2_projection(*mesh, c.value));
      eps[name][level - 4] = neumann_l2_error(*mesh, sol.alpha, c);
    }
  }
  bool pass = true;
  std::ostringstream detail;
  for (const auto& [name, ref] : table) {
    const double scale = name == "f1" ? 1.0 : 4.0 * M_PI;
    const double e4 = scale * eps[name][0], e5 = scale * eps[name][1];
    const bool ok = e4 >= ref.first / 3 && e4 <= 3 * ref.first && e5 >= ref.second / 3 && e5 <= 3 * ref.second &&
                    e5 / e4 >= 0.35 && e5 / e4 <= 0.65;
    pass = pass && ok;
    detail << name << " " << fmt("%.2e/%.2e ratio %.2f", e4, e5, e5 / e4);
    if (scale != 1.0) detail << fmt(" (raw %.2e/%.2e)", eps[name][0], eps[name][1]);
    detail << (ok ? "; " : " OUT OF BAND; ");
  }
  detail << "bands x3 around 1.3e-1/6.3e-2, 2.4e-2/1.2e-2, 1.8e-1/9.0e-2, ratio in [0.35,0.65]";
  return {pass, detail.str()};
}

Outcome c7_storage() {
  const auto opts = options(2, 1e-3, 0.5);
  // accuracy at level 4 so the comparison is not bought with error
  const GalerkinOperator op4(sphere(4), LayerKind::single_layer);
  const DenseMatrix dense = op4.assemble_dense();
  std::map<Method, double> err;
  for (Method m : {Method::green, Method::hybrid, Method::h2})
    err[m] = compare_dense(*compress(op4, m, {1.0, 16}, opts).op, dense).rel_frobenius;

  const GalerkinOperator op(sphere(5), LayerKind::single_layer);
  std::map<Method, double> bytes;
  for (Method m : {Method::green, Method::hybrid, Method::h2})
    bytes[m] = static_cast<double>(compress(op, m, {1.0, 16}, opts).storage.total_bytes);
  const double r1 = bytes[Method::hybrid] / bytes[Method::green];
  const double r2 = bytes[Method::h2] / bytes[Method::hybrid];
  const bool accurate = err[Method::hybrid] <= err[Method::green] && err[Method::h2] <= err[Method::green];
  return {r1 <= 0.6 && r2 <= 0.6 && accurate,
          fmt("level 5, m=2, tol 1e-3: hybrid/green %.3f, H2/hybrid %.3f (limit 0.6); level 4 errors green %.1e "
              "hybrid %.1e H2 %.1e",
              r1, r2, err[Method::green], err[Method::hybrid], err[Method::h2])};
}

Outcome c8_scaling() {
  const auto opts = options(2, 1e-4, 1.0);
  std::array<double, 2> bpd{}, tpd{};
  for (int level : {5, 6}) {
    const GalerkinOperator op(sphere(level), LayerKind::single_layer);
    const auto c = compress(op, Method::h2, {2.0, 16}, opts);
    bpd[level - 5] = c.storage.bytes_per_dof;
    tpd[level - 5] = c.build_seconds / static_cast<double>(op.rows());
  }
  const double rb = bpd[1] / bpd[0], rt = tpd[1] / tpd[0];
  return {rb <= 1.25 && rt <= 1.6, fmt("H2 levels 5->6: bytes/dof %.0f -> %.0f ratio %.3f (limit 1.25), time/dof "
                                       "ratio %.3f (limit 1.6)",
                                       bpd[0], bpd[1], rb, rt)};
}

Outcome c9_hybrid_bound() {
  const GalerkinOperator op(sphere(3), LayerKind::single_layer);
  // level 3 admissible clusters hold at most 16 indices; m = 1 keeps 2|K| below that
  const int m = 1;
  const double tol = 1e-3;
  const auto blocks = build_trees(op, {1.0, 16});
  const auto hybrid = compress(op, Method::hybrid, {1.0, 16}, options(m, tol, 0.5));
  bool pass = true;
  double worst = 0.0, consistency = 0.0;
  int truncated = 0;
  // row clusters wider than 2|K|, where C_t can truncate A_t
  for (std::size_t k : sample_admissible(*blocks, 10, 9, 12 * m * m)) {
    const Block& b = blocks->block(blocks->leaves()[k]);
    const DenseMatrix g = exact_block(op, *blocks, k);
    const auto gb = green_block(op, blocks->row_tree(), b.row, blocks->col_tree(), b.col, m, 0.5);
    const auto ca = aca_full_pivot(gb.a, tol, 12 * m * m);
    const auto ip = build_interpolant(ca);
    const DenseMatrix jg = matmul(ip.v, g.select_rows(ip.pivots));
    consistency = std::max(consistency, frobenius_norm(jg - hybrid.hmatrix()->block_dense(k)) / frobenius_norm(g));
    const double lhs = spectral_error(jg, g, 200);
    const double rhs = (1.0 + estimate_norm2(ip.v, 200)) * spectral_error(matmul_transposed(gb.a, gb.b), g, 200) +
                       spectral_error(matmul_transposed(ca.c, ca.d), gb.a, 200) * estimate_norm2(gb.b, 200);
    pass = pass && lhs <= rhs;
    truncated += lhs > 1e-12 * estimate_norm2(g, 200);
    worst = std::max(worst, lhs / rhs);
  }
  return {pass && consistency <= 1e-10,
          fmt("10 blocks at level 3, m=1, |t| > 2|K|, tol 1e-3: max lhs/rhs %.2e (limit 1), %d blocks with nonzero lhs, stored "
              "block vs J_t G %.1e",
              worst, truncated, consistency)};
}

Outcome c10_evaluations() {
  const GalerkinOperator op(sphere(4), LayerKind::single_layer);
  const auto count = [&op](std::size_t leaf) {
    op.reset_counters();
    const auto c = compress(op, Method::h2, {2.0, leaf}, options(2, 2e-3, 1.0));
    return std::pair{static_cast<double>(op.evaluations(EntryUse::farfield)),
                     static_cast<double>(c.blocks->admissible_pair_count())};
  };
  const auto [far, pairs] = count(128);
  const auto [far16, pairs16] = count(16);
  const double frac = far / pairs;
  return {frac < 0.05, fmt("level 4, leaf 128: %.0f farfield entries for %.0f admissible pairs = %.2f%% (limit 5%%); "
                           "leaf 16 gives %.1f%%",
                           far, pairs, 100.0 * frac, 100.0 * far16 / pairs16)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria C1..C10"};
  std::vector<std::string> only;
  app.add_option("--only", only, "Run only these criteria, e.g. C5");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1", c1_quadrature}, {"C2", c2_green_decay}, {"C3", c3_aca_rank},  {"C4", c4_identities},
      {"C5", c5_dense},      {"C6", c6_dirichlet},   {"C7", c7_storage},   {"C8", c8_scaling},
      {"C9", c9_hybrid_bound}, {"C10", c10_evaluations}};

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome out{false, ""};
    try {
      out = run();
    } catch (const std::exception& e) {
      out.detail = std::string("exception: ") + e.what();
    }
    failed += !out.pass;
    std::cout << name << (out.pass ? " PASS " : " FAIL ") << out.detail << std::endl;
  }
  return failed ? 1 : 0;
}
