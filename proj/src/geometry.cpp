#include "grh/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace grh {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  areas_.reserve(triangles_.size());
  normals_.reserve(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (std::size_t v : tri)
      if (v >= vertices_.size())
        throw MeshError("triangle " + std::to_string(t) + " references missing vertex " + std::to_string(v));
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
    const Vec3 n = cross(vertices_[tri[1]] - vertices_[tri[0]], vertices_[tri[2]] - vertices_[tri[0]]);
    const double len = norm2(n);
    if (!(len > 0.0)) throw MeshError("triangle " + std::to_string(t) + " is degenerate (zero area)");
    areas_.push_back(0.5 * len);
    normals_.push_back((1.0 / len) * n);
  }

  incidence_offsets_.assign(vertices_.size() + 1, 0);
  for (const auto& tri : triangles_)
    for (std::size_t v : tri) ++incidence_offsets_[v + 1];
  for (std::size_t v = 0; v < vertices_.size(); ++v) incidence_offsets_[v + 1] += incidence_offsets_[v];
  incidence_.resize(incidence_offsets_.back());
  std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
  for (std::size_t t = 0; t < triangles_.size(); ++t)
    for (std::size_t v : triangles_[t]) incidence_[fill[v]++] = t;
}

std::array<Vec3, 3> TriangleMesh::corners(std::size_t t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

Vec3 TriangleMesh::centroid(std::size_t t) const {
  const auto c = corners(t);
  return (1.0 / 3.0) * (c[0] + c[1] + c[2]);
}

Box TriangleMesh::triangle_box(std::size_t t) const {
  Box b;
  for (const auto& p : corners(t)) b.extend(p);
  return b;
}

std::span<const std::size_t> TriangleMesh::incident_triangles(std::size_t v) const {
  return {incidence_.data() + incidence_offsets_[v], incidence_offsets_[v + 1] - incidence_offsets_[v]};
}

double TriangleMesh::total_area() const {
  double a = 0.0;
  for (double x : areas_) a += x;
  return a;
}

double TriangleMesh::enclosed_volume() const {
  double v = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto c = corners(t);
    v += dot(c[0], cross(c[1], c[2])) / 6.0;
  }
  return v;
}

TriangleMesh TriangleMesh::flipped() const {
  std::vector<Triangle> tris = triangles_;
  for (auto& tri : tris) std::swap(tri[1], tri[2]);
  return TriangleMesh(vertices_, std::move(tris));
}

namespace {

struct EdgeUse {
  std::size_t forward = 0;   // uses as (min, max)
  std::size_t backward = 0;  // uses as (max, min)
};

std::map<std::pair<std::size_t, std::size_t>, EdgeUse> edge_uses(const TriangleMesh& mesh) {
  std::map<std::pair<std::size_t, std::size_t>, EdgeUse> uses;
  for (const auto& tri : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = tri[k];
      const std::size_t b = tri[(k + 1) % 3];
      auto& use = uses[{std::min(a, b), std::max(a, b)}];
      if (a < b)
        ++use.forward;
      else
        ++use.backward;
    }
  }
  return uses;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-blank line with comments stripped; false at end of input.
  bool next(std::string_view& line) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++number_;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string_view::npos) continue;
      line = line.substr(first);
      return true;
    }
    return false;
  }

  [[nodiscard]] std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto first = line.find_first_not_of(" \t\r", pos);
    if (first == std::string_view::npos) break;
    auto last = line.find_first_of(" \t\r", first);
    if (last == std::string_view::npos) last = line.size();
    out.push_back(line.substr(first, last - first));
    pos = last;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
  T value{};
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) throw MeshError("cannot parse number '" + std::string(token) + "'", line);
  return value;
}

}  // namespace

TriangleMesh load_off(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw MeshError("empty document", 1);
  auto toks = tokens(line);
  if (toks.empty() || toks[0] != "OFF") throw MeshError("missing OFF header", reader.number());
  toks.erase(toks.begin());
  if (toks.empty()) {
    if (!reader.next(line)) throw MeshError("missing counts line", reader.number());
    toks = tokens(line);
  }
  if (toks.size() < 2) throw MeshError("counts line needs vertex and face counts", reader.number());
  const auto nv = parse_number<std::size_t>(toks[0], reader.number());
  const auto nf = parse_number<std::size_t>(toks[1], reader.number());

  std::vector<Vec3> vertices;
  vertices.reserve(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    if (!reader.next(line)) throw MeshError("unexpected end of input in vertex list", reader.number());
    toks = tokens(line);
    if (toks.size() < 3) throw MeshError("vertex needs three coordinates", reader.number());
    vertices.push_back({parse_number<double>(toks[0], reader.number()), parse_number<double>(toks[1], reader.number()),
                        parse_number<double>(toks[2], reader.number())});
  }

  std::vector<Triangle> triangles;
  triangles.reserve(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    if (!reader.next(line)) throw MeshError("unexpected end of input in face list", reader.number());
    toks = tokens(line);
    const auto count = parse_number<std::size_t>(toks[0], reader.number());
    if (count != 3) throw MeshError("non-triangular face", reader.number());
    if (toks.size() < 4) throw MeshError("face lists fewer than 3 vertices", reader.number());
    Triangle tri{};
    for (int k = 0; k < 3; ++k) {
      tri[k] = parse_number<std::size_t>(toks[k + 1], reader.number());
      if (tri[k] >= nv) throw MeshError("vertex index out of range", reader.number());
    }
    triangles.push_back(tri);
  }

  TriangleMesh mesh(std::move(vertices), std::move(triangles));
  const auto report = validate(mesh);
  if (!report.closed) throw MeshError("open surface: " + std::to_string(report.boundary_edges) + " boundary edges");
  if (!report.consistently_oriented)
    throw MeshError("inconsistent orientation: " + std::to_string(report.orientation_conflicts) + " edges");
  return mesh;
}

TriangleMesh load_off_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_off(buffer.str());
}

void write_off(std::ostream& out, const TriangleMesh& mesh) {
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.triangle_count() << " 0\n";
  char buf[96];
  for (const auto& p : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out << buf;
  }
  for (const auto& tri : mesh.triangles()) out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
}

TriangleMesh generate_sphere(int level) {
  if (level < 0 || level > kMaxSphereLevel)
    throw std::invalid_argument("sphere level must be in [0, " + std::to_string(kMaxSphereLevel) + "]");

  std::vector<Vec3> vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<Triangle> triangles;
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int sz : {1, -1}) {
        Triangle tri{sx > 0 ? 0u : 1u, sy > 0 ? 2u : 3u, sz > 0 ? 4u : 5u};
        if (sx * sy * sz < 0) std::swap(tri[1], tri[2]);
        triangles.push_back(tri);
      }

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoints;
    auto midpoint = [&](std::size_t a, std::size_t b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
      const Vec3 m = 0.5 * (vertices[a] + vertices[b]);
      vertices.push_back((1.0 / norm2(m)) * m);
      midpoints.emplace(key, vertices.size() - 1);
      return vertices.size() - 1;
    };
    std::vector<Triangle> refined;
    refined.reserve(4 * triangles.size());
    for (const auto& tri : triangles) {
      const std::size_t ab = midpoint(tri[0], tri[1]);
      const std::size_t bc = midpoint(tri[1], tri[2]);
      const std::size_t ca = midpoint(tri[2], tri[0]);
      refined.push_back({tri[0], ab, ca});
      refined.push_back({ab, tri[1], bc});
      refined.push_back({ca, bc, tri[2]});
      refined.push_back({ab, bc, ca});
    }
    triangles = std::move(refined);
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

ValidationReport validate(const TriangleMesh& mesh) {
  ValidationReport report;
  for (const auto& [edge, use] : edge_uses(mesh)) {
    const std::size_t total = use.forward + use.backward;
    if (total == 1)
      ++report.boundary_edges;
    else if (total > 2)
      ++report.nonmanifold_edges;
    else if (use.forward != 1)
      ++report.orientation_conflicts;
  }
  report.closed = report.boundary_edges == 0 && report.nonmanifold_edges == 0;
  report.consistently_oriented = report.orientation_conflicts == 0;

  if (mesh.triangle_count() > 0) {
    report.min_area = mesh.area(0);
    report.max_area = mesh.area(0);
    Vec3 barycenter{0, 0, 0};
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      report.min_area = std::min(report.min_area, mesh.area(t));
      report.max_area = std::max(report.max_area, mesh.area(t));
      barycenter = barycenter + mesh.area(t) * mesh.centroid(t);
    }
    barycenter = (1.0 / mesh.total_area()) * barycenter;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      if (dot(mesh.normal(t), mesh.centroid(t) - barycenter) > 0.0)
        ++report.outward_faces;
      else
        ++report.inward_faces;
    }
  }

  if (report.boundary_edges > 0) report.findings.push_back(std::to_string(report.boundary_edges) + " boundary edges");
  if (report.nonmanifold_edges > 0)
    report.findings.push_back(std::to_string(report.nonmanifold_edges) + " non-manifold edges");
  if (report.orientation_conflicts > 0)
    report.findings.push_back(std::to_string(report.orientation_conflicts) + " edges with inconsistent orientation");
  if (report.inward_faces > 0)
    report.findings.push_back(std::to_string(report.inward_faces) + " faces pointing inward");
  return report;
}

std::ostream& operator<<(std::ostream& out, const ValidationReport& r) {
  out << "closed: " << (r.closed ? "yes" : "no") << '\n'
      << "consistently oriented: " << (r.consistently_oriented ? "yes" : "no") << '\n'
      << "area range: [" << r.min_area << ", " << r.max_area << "]\n"
      << "outward faces: " << r.outward_faces << ", inward faces: " << r.inward_faces << '\n';
  for (const auto& f : r.findings) out << "finding: " << f << '\n';
  return out;
}

}  // namespace grh
