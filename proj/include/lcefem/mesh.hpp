#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lce {

/// Boundary classification of the quarter domain [0.5 AR, AR] x [0.5, 1].
/// Vertices at corners carry two tags, so tags are stored as a bit set.
enum class BoundaryTag : std::uint8_t {
  Interior = 0,
  SymX = 1u << 0,   // X = 0.5 AR, vertical symmetry line
  SymY = 1u << 1,   // Y = 0.5, horizontal symmetry line
  Clamp = 1u << 2,  // X = AR
  Free = 1u << 3,   // Y = 1
};

using TagSet = std::uint8_t;

constexpr TagSet bit(BoundaryTag t) { return static_cast<TagSet>(t); }
constexpr bool has_tag(TagSet s, BoundaryTag t) { return (s & bit(t)) != 0; }

std::string tag_name(TagSet s);

struct MeshParams {
  double h = 0.0625;  // must be 2^-k, k >= 1
  double ar = 1.0;    // full-domain aspect ratio
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BoundaryEdge {
  std::array<int, 2> vertices{};
  BoundaryTag tag = BoundaryTag::Interior;
};

/// Location of a point inside a triangle.
struct ElementPoint {
  int element = -1;
  std::array<double, 3> bary{};
};

/// Uniform N x N triangulation of the quarter domain.  Every grid square is
/// split along its lower-left to upper-right diagonal.  Vertex (i, j) has index
/// j * (N + 1) + i, so refinements nest exactly.
class Mesh {
 public:
  Mesh() = default;

  int cells_per_side() const { return n_; }
  double h() const { return h_; }
  double ar() const { return ar_; }
  double x_min() const { return 0.5 * ar_; }
  double x_max() const { return ar_; }
  double y_min() const { return 0.5; }
  double y_max() const { return 1.0; }
  double area() const { return 0.25 * ar_; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<TagSet>& vertex_tags() const { return vertex_tags_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  double signed_area(int tri) const;

  /// Grid coordinate of lattice point (i, j) on a lattice with `divisions`
  /// intervals per side.  Computed as an affine image of integer indices so
  /// coarse and fine lattices agree bit for bit.
  Point lattice_point(long i, long j, long divisions) const;

  /// Finds the triangle containing (x, y) and its barycentric coordinates.
  /// Points on shared edges are attributed deterministically.  Throws
  /// std::out_of_range for points outside the domain (with a 1e-12 slack).
  ElementPoint locate(double x, double y) const;

  friend Mesh build_uniform_mesh(const MeshParams& params);

 private:
  int n_ = 0;
  double h_ = 0.0;
  double ar_ = 0.0;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<TagSet> vertex_tags_;
  std::vector<BoundaryEdge> boundary_edges_;
};

/// Throws std::invalid_argument unless h = 2^-k (k >= 1) and ar > 0.
void validate(const MeshParams& params);

Mesh build_uniform_mesh(const MeshParams& params);

Mesh refine(const Mesh& mesh);

/// Plain-text dump: `vertices <nv> triangles <nt>`, then `x y tag` lines, then
/// `i j k` lines.
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace lce
