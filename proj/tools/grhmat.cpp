// grhmat: mesh generation, compression checks, benchmarks and Dirichlet
// solves on sphere meshes.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grh/bem.hpp"
#include "grh/dirichlet.hpp"
#include "grh/geometry.hpp"
#include "grh/hierarchy.hpp"
#include "grh/pipeline.hpp"

namespace {

using namespace grh;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int mesh_level = -1;
  std::string mesh_file;
  std::string levels;
  std::string method = "h2";
  std::string m_list = "2";
  std::string tol_list = "1e-5";
  double eps_aca = -1.0;
  double eta = 1.0;
  double delta_scale = 0.5;
  std::size_t leaf_size = 16;
  int quad_regular = 3;
  int quad_singular = 5;
  std::string cases = "f1";
  std::string op = "slp";
  std::string out;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::size_t sample_blocks = 10;
  double max_error = -1.0;
};

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::stringstream cell(item);
    T value{};
    cell >> value;
    if (cell.fail() || !cell.eof()) throw InputError(std::string("bad entry '") + item + "' in " + what);
    out.push_back(value);
  }
  if (out.empty()) throw InputError(std::string("empty list for ") + what);
  return out;
}

std::vector<std::string> parse_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  if (out.empty()) throw InputError("empty case list");
  return out;
}

void validate_numbers(const RunConfig& cfg, const std::vector<int>& ms, const std::vector<double>& tols) {
  for (int m : ms)
    if (m < 1 || m > 16) throw InputError("-m values must lie in [1, 16]");
  for (double t : tols)
    if (!(t > 0.0) || t >= 1.0) throw InputError("--tol values must lie in (0, 1)");
  if (cfg.eta != 1.0 && cfg.eta != 2.0) throw InputError("--eta must be 1 or 2");
  if (cfg.delta_scale != 0.5 && cfg.delta_scale != 1.0) throw InputError("--delta-scale must be 0.5 or 1.0");
  if (cfg.leaf_size < 1) throw InputError("--leaf-size must be positive");
  if (cfg.quad_regular < 1 || cfg.quad_regular > kMaxTriangleOrder) throw InputError("--quad-regular out of range");
  if (cfg.quad_singular < 1 || cfg.quad_singular > kMaxSauterOrder) throw InputError("--quad-singular out of range");
  if (cfg.threads < 1) throw InputError("--threads must be positive");
}

void validate_method(Method method, const RunConfig& cfg) {
  // Pure Green factors need B_s outside omega_t, guaranteed by
  // delta_t < diam(B_t) / eta.
  if (method == Method::green && !(cfg.delta_scale * cfg.eta < 1.0))
    throw InputError("method green needs delta-scale * eta < 1 (admissible blocks would intersect omega_t)");
}

std::shared_ptr<const TriangleMesh> load_mesh(const RunConfig& cfg, int level) {
  if (!cfg.mesh_file.empty()) {
    try {
      return std::make_shared<const TriangleMesh>(load_off_file(cfg.mesh_file));
    } catch (const std::exception& e) {
      throw InputError(cfg.mesh_file + ": " + e.what());
    }
  }
  if (level < 0 || level > kMaxSphereLevel)
    throw InputError("mesh level must lie in [0, " + std::to_string(kMaxSphereLevel) + "]");
  return std::make_shared<const TriangleMesh>(generate_sphere(level));
}

std::vector<int> mesh_levels(const RunConfig& cfg) {
  if (!cfg.mesh_file.empty()) return {-1};
  if (!cfg.levels.empty()) return parse_list<int>(cfg.levels, "--levels");
  if (cfg.mesh_level < 0) throw InputError("need --mesh-level, --levels or --mesh-file");
  return {cfg.mesh_level};
}

class CsvSink {
 public:
  explicit CsvSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file " + path);
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void row(const std::string& line) {
    out() << line << '\n';
    out().flush();
  }

 private:
  std::ofstream file_;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

BuildOptions build_options(const RunConfig& cfg, int m, double tol) {
  BuildOptions b;
  b.m = m;
  b.delta_scale = cfg.delta_scale;
  b.tol = tol;
  b.eps_aca = cfg.eps_aca > 0.0 ? cfg.eps_aca : tol;
  b.threads = cfg.threads;
  return b;
}

LayerKind parse_layer(const std::string& name) {
  if (name == "slp") return LayerKind::single_layer;
  if (name == "dlp") return LayerKind::double_layer;
  throw InputError("--operator must be slp or dlp");
}

// ------------------------------------------------------------------ mesh

int cmd_mesh(const RunConfig& cfg) {
  const auto mesh = load_mesh(cfg, cfg.mesh_level);
  const ValidationReport report = validate(*mesh);
  if (!cfg.out.empty()) {
    std::ofstream file(cfg.out);
    if (!file) throw InputError("cannot open output file " + cfg.out);
    write_off(file, *mesh);
  }
  std::cout << "triangles " << mesh->triangle_count() << "\nvertices " << mesh->vertex_count() << '\n' << report;
  return report.ok() ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------- verify

DenseMatrix reference_block(const DenseMatrix& dense, std::span<const std::size_t> rows,
                            std::span<const std::size_t> cols) {
  DenseMatrix out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = dense(rows[a], cols[b]);
  return out;
}

int cmd_verify(const RunConfig& cfg) {
  const auto ms = parse_list<int>(cfg.m_list, "-m");
  const auto tols = parse_list<double>(cfg.tol_list, "--tol");
  validate_numbers(cfg, ms, tols);
  const Method method = parse_method(cfg.method);
  if (method == Method::dense) throw InputError("verify compares a compressed method against dense");
  validate_method(method, cfg);
  const auto levels = mesh_levels(cfg);
  if (levels.size() != 1) throw InputError("verify runs on a single mesh");
  const auto mesh = load_mesh(cfg, levels.front());
  if (mesh->triangle_count() > kMaxDenseCompare)
    throw InputError("verify needs n <= " + std::to_string(kMaxDenseCompare) + " for the dense reference");

  const GalerkinOperator op(mesh, parse_layer(cfg.op), {cfg.quad_regular, cfg.quad_singular});
  const DenseMatrix dense = op.assemble_dense(cfg.threads);
  CsvSink csv(cfg.out);
  csv.row("block_id,method,m,tol,rel_frobenius,rel_spectral,rank");
  bool failed = false;
  for (int m : ms)
    for (double tol : tols) {
      const Compressed c = compress(op, method, {cfg.eta, cfg.leaf_size}, build_options(cfg, m, tol));
      const ErrorReport e = compare_dense(*c.op, dense);
      const std::string prefix = std::string(to_string(method)) + "," + std::to_string(m) + "," + fmt("%g", tol);
      csv.row("all," + prefix + "," + fmt("%.6e", e.rel_frobenius) + "," + fmt("%.6e", e.rel_spectral) + "," +
              std::to_string(c.storage.max_rank));
      if (cfg.max_error > 0.0 && e.rel_frobenius > cfg.max_error) failed = true;

      const BlockTree& blocks = *c.blocks;
      std::vector<std::size_t> admissible;
      for (std::size_t k = 0; k < blocks.leaves().size(); ++k)
        if (blocks.block(blocks.leaves()[k]).admissible) admissible.push_back(k);
      std::vector<std::size_t> picked;
      std::mt19937_64 rng(cfg.seed);
      std::sample(admissible.begin(), admissible.end(), std::back_inserter(picked), cfg.sample_blocks, rng);
      for (std::size_t k : picked) {
        const Block& b = blocks.block(blocks.leaves()[k]);
        const DenseMatrix ref =
            reference_block(dense, blocks.row_tree().indices(b.row), blocks.col_tree().indices(b.col));
        DenseMatrix approx;
        std::size_t rank = 0;
        if (const auto* h = c.hmatrix()) {
          approx = h->block_dense(k);
          rank = h->lowrank(k).rank();
        } else if (const auto* h2 = c.h2matrix()) {
          approx = h2->block_dense(k);
          rank = h2->row_basis().rank(b.row);
        }
        const double ref_f = frobenius_norm(ref);
        const double ref_2 = estimate_norm2(ref, 100);
        csv.row(std::to_string(blocks.leaves()[k]) + "," + prefix + "," +
                fmt("%.6e", frobenius_norm(approx - ref) / ref_f) + "," +
                fmt("%.6e", spectral_error(approx, ref, 100) / ref_2) + "," + std::to_string(rank));
      }
    }
  return failed ? kExitFailed : kExitOk;
}

// ----------------------------------------------------------------- bench

int cmd_bench(const RunConfig& cfg) {
  const auto ms = parse_list<int>(cfg.m_list, "-m");
  const auto tols = parse_list<double>(cfg.tol_list, "--tol");
  validate_numbers(cfg, ms, tols);
  const auto methods = parse_names(cfg.method);
  for (const auto& name : methods) validate_method(parse_method(name), cfg);
  CsvSink csv(cfg.out);
  csv.row("n,method,m,tol,eta,delta_scale,build_seconds,bytes,bytes_per_dof,matvec_seconds");
  for (int level : mesh_levels(cfg)) {
    const auto mesh = load_mesh(cfg, level);
    const GalerkinOperator op(mesh, parse_layer(cfg.op), {cfg.quad_regular, cfg.quad_singular});
    for (const auto& name : methods)
      for (int m : ms)
        for (double tol : tols) {
          const Method method = parse_method(name);
          const Compressed c = compress(op, method, {cfg.eta, cfg.leaf_size}, build_options(cfg, m, tol));
          const double mv = time_matvec(*c.op);
          csv.row(std::to_string(op.rows()) + "," + name + "," + std::to_string(m) + "," + fmt("%g", tol) + "," +
                  fmt("%g", cfg.eta) + "," + fmt("%g", cfg.delta_scale) + "," + fmt("%.3f", c.build_seconds) + "," +
                  std::to_string(c.storage.total_bytes) + "," + fmt("%.1f", c.storage.bytes_per_dof) + "," +
                  fmt("%.5f", mv));
        }
  }
  return kExitOk;
}

// ----------------------------------------------------------------- solve

int cmd_solve(const RunConfig& cfg) {
  const auto ms = parse_list<int>(cfg.m_list, "-m");
  const auto tols = parse_list<double>(cfg.tol_list, "--tol");
  validate_numbers(cfg, ms, tols);
  if (ms.size() != 1 || tols.size() != 1) throw InputError("solve takes a single -m and --tol");
  const Method method = parse_method(cfg.method);
  validate_method(method, cfg);
  std::vector<HarmonicTestCase> cases;
  for (const auto& name : parse_names(cfg.cases)) {
    try {
      cases.push_back(HarmonicTestCase::make(name));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  CsvSink csv(cfg.out);
  csv.row("n,case,epsilon_L2,cg_iterations,build_seconds,solve_seconds");
  for (int level : mesh_levels(cfg)) {
    const auto mesh = load_mesh(cfg, level);
    const QuadratureOrders orders{cfg.quad_regular, cfg.quad_singular};
    const GalerkinOperator slp(mesh, LayerKind::single_layer, orders);
    const GalerkinOperator dlp(mesh, LayerKind::double_layer, orders);
    const BuildOptions b = build_options(cfg, ms.front(), tols.front());
    const Compressed v = compress(slp, method, {cfg.eta, cfg.leaf_size}, b);
    const Compressed k = compress(dlp, method, {cfg.eta, cfg.leaf_size}, b);
    const double build_seconds = v.build_seconds + k.build_seconds;
    for (const auto& c : cases) {
      const auto start = std::chrono::steady_clock::now();
      const auto beta = l2_projection(*mesh, c.value);
      const DirichletSolution sol = solve_dirichlet(*v.op, *k.op, *mesh, beta);
      const double solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const double err = neumann_l2_error(*mesh, sol.alpha, c);
      csv.row(std::to_string(mesh->triangle_count()) + "," + c.name + "," + fmt("%.6e", err) + "," +
              std::to_string(sol.iterations) + "," + fmt("%.3f", build_seconds) + "," + fmt("%.3f", solve_seconds));
    }
  }
  return kExitOk;
}

void add_mesh_options(CLI::App* cmd, RunConfig& cfg) {
  auto* level = cmd->add_option("--mesh-level", cfg.mesh_level, "Sphere refinement level (8 * 4^level triangles)");
  auto* file = cmd->add_option("--mesh-file", cfg.mesh_file, "Closed triangulated surface in OFF format");
  level->excludes(file);
}

void add_compression_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--method", cfg.method, "green, hybrid, h2 or aca (solve also: dense)");
  cmd->add_option("-m", cfg.m_list, "Gauss points per face direction, comma list");
  cmd->add_option("--tol", cfg.tol_list, "Cross approximation tolerance, comma list");
  cmd->add_option("--eps-aca", cfg.eps_aca, "Baseline ACA stopping parameter (default: --tol)");
  cmd->add_option("--eta", cfg.eta, "Admissibility parameter {1,2}");
  cmd->add_option("--delta-scale", cfg.delta_scale, "delta_t / diam(B_t) {0.5,1.0}");
  cmd->add_option("--leaf-size", cfg.leaf_size, "Maximal leaf cluster size");
  cmd->add_option("--quad-regular", cfg.quad_regular, "Gauss points per direction, regular pairs and Green factors");
  cmd->add_option("--quad-singular", cfg.quad_singular, "Gauss points per direction, Sauter rules");
  cmd->add_option("--out", cfg.out, "CSV output path (default stdout)");
  cmd->add_option("--threads", cfg.threads, "Worker threads");
  cmd->add_option("--seed", cfg.seed, "Seed for block sampling");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green hybrid H and H2 compression of Laplace BEM matrices"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* mesh = app.add_subcommand("mesh", "Generate or check a mesh");
  add_mesh_options(mesh, cfg);
  mesh->add_option("--out", cfg.out, "Write the mesh as OFF");

  auto* verify = app.add_subcommand("verify", "Errors against the dense matrix");
  add_mesh_options(verify, cfg);
  add_compression_options(verify, cfg);
  verify->add_option("--operator", cfg.op, "slp or dlp");
  verify->add_option("--sample-blocks", cfg.sample_blocks, "Admissible blocks reported individually");
  verify->add_option("--max-error", cfg.max_error, "Exit 1 if a global relative Frobenius error exceeds this");

  auto* bench = app.add_subcommand("bench", "Setup time and storage");
  add_mesh_options(bench, cfg);
  bench->add_option("--levels", cfg.levels, "Sphere levels, comma list");
  add_compression_options(bench, cfg);
  bench->add_option("--operator", cfg.op, "slp or dlp");

  auto* solve = app.add_subcommand("solve", "Dirichlet problem on the mesh");
  add_mesh_options(solve, cfg);
  solve->add_option("--levels", cfg.levels, "Sphere levels, comma list");
  add_compression_options(solve, cfg);
  solve->add_option("--case", cfg.cases, "f1, f2, f3 or a comma list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (mesh->parsed()) return cmd_mesh(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
    return cmd_solve(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const MeshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kExitFailed;
  }
}
