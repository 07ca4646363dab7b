#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "grh/vec3.hpp"

namespace grh {

using Triangle = std::array<std::size_t, 3>;

/// Raised for malformed OFF input or meshes that violate the closed,
/// consistently oriented surface contract.
class MeshError : public std::runtime_error {
 public:
  MeshError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  /// 1-based input line, 0 when not tied to a line.
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Flat triangulation of a surface. Areas and unit normals follow the
/// vertex winding order (right-hand rule).
class TriangleMesh {
 public:
  TriangleMesh() = default;
  /// Validates indices and rejects zero-area triangles; does not check
  /// closedness (see validate()).
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  [[nodiscard]] std::size_t vertex_count() const { return vertices_.size(); }
  [[nodiscard]] std::size_t triangle_count() const { return triangles_.size(); }

  [[nodiscard]] const std::vector<Vec3>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<Triangle>& triangles() const { return triangles_; }
  [[nodiscard]] const Vec3& vertex(std::size_t v) const { return vertices_[v]; }
  [[nodiscard]] const Triangle& triangle(std::size_t t) const { return triangles_[t]; }
  [[nodiscard]] double area(std::size_t t) const { return areas_[t]; }
  [[nodiscard]] const Vec3& normal(std::size_t t) const { return normals_[t]; }
  [[nodiscard]] std::array<Vec3, 3> corners(std::size_t t) const;
  [[nodiscard]] Vec3 centroid(std::size_t t) const;
  [[nodiscard]] Box triangle_box(std::size_t t) const;

  /// Triangles containing vertex v.
  [[nodiscard]] std::span<const std::size_t> incident_triangles(std::size_t v) const;

  [[nodiscard]] double total_area() const;
  /// Sum of signed tetrahedron volumes against the origin.
  [[nodiscard]] double enclosed_volume() const;

  /// Same vertices, every triangle's winding reversed.
  [[nodiscard]] TriangleMesh flipped() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<double> areas_;
  std::vector<Vec3> normals_;
  std::vector<std::size_t> incidence_offsets_;
  std::vector<std::size_t> incidence_;
};

struct ValidationReport {
  bool closed = false;
  bool consistently_oriented = false;
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;
  std::size_t orientation_conflicts = 0;
  double min_area = 0.0;
  double max_area = 0.0;
  std::size_t outward_faces = 0;
  std::size_t inward_faces = 0;
  std::vector<std::string> findings;

  [[nodiscard]] bool ok() const { return closed && consistently_oriented && inward_faces == 0; }
};

/// Reads an ASCII OFF document with triangular faces. Rejects open or
/// inconsistently oriented surfaces.
TriangleMesh load_off(std::string_view text);
TriangleMesh load_off_file(const std::string& path);

void write_off(std::ostream& out, const TriangleMesh& mesh);

/// Regular octahedron refined `level` times by 4-way splitting, vertices
/// projected to the unit sphere; 8 * 4^level outward-oriented triangles.
TriangleMesh generate_sphere(int level);

constexpr int kMaxSphereLevel = 8;

/// Closedness, orientation consistency, area range and outwardness
/// (sign of n . (centroid - surface barycenter), meaningful for
/// star-shaped meshes).
ValidationReport validate(const TriangleMesh& mesh);

std::ostream& operator<<(std::ostream& out, const ValidationReport& report);

}  // namespace grh
