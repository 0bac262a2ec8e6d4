#include "lcefem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lce {

std::string tag_name(TagSet s) {
  if (s == 0) return "interior";
  std::string out;
  const std::pair<BoundaryTag, const char*> names[] = {
      {BoundaryTag::SymX, "SymX"},
      {BoundaryTag::SymY, "SymY"},
      {BoundaryTag::Clamp, "Clamp"},
      {BoundaryTag::Free, "Free"},
  };
  for (const auto& [tag, name] : names) {
    if (!has_tag(s, tag)) continue;
    if (!out.empty()) out += '+';
    out += name;
  }
  return out;
}

void validate(const MeshParams& params) {
  if (!(params.ar > 0.0) || !std::isfinite(params.ar)) {
    throw std::invalid_argument("mesh: aspect ratio must be positive");
  }
  int exponent = 0;
  const double mantissa = std::frexp(params.h, &exponent);
  // h = 2^-k  <=>  mantissa 0.5 and exponent 1 - k with k >= 1
  if (!(params.h > 0.0) || mantissa != 0.5 || exponent > 0) {
    throw std::invalid_argument("mesh: h must be 2^-k for an integer k >= 1");
  }
}

double Mesh::signed_area(int tri) const {
  const auto& t = triangles_.at(static_cast<std::size_t>(tri));
  const Point& p0 = vertices_[t[0]];
  const Point& p1 = vertices_[t[1]];
  const Point& p2 = vertices_[t[2]];
  return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

Point Mesh::lattice_point(long i, long j, long divisions) const {
  // x = AR * (D + i) / (2 D), y = (D + j) / (2 D)
  const double d = static_cast<double>(divisions);
  return {ar_ * (static_cast<double>(divisions + i) / (2.0 * d)),
          static_cast<double>(divisions + j) / (2.0 * d)};
}

ElementPoint Mesh::locate(double x, double y) const {
  constexpr double slack = 1e-12;
  if (x < x_min() - slack || x > x_max() + slack || y < y_min() - slack ||
      y > y_max() + slack) {
    throw std::out_of_range("mesh: point outside the computational domain");
  }
  const double s = (x - x_min()) / (x_max() - x_min()) * n_;
  const double r = (y - y_min()) / (y_max() - y_min()) * n_;
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, n_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(r)), 0, n_ - 1);
  const double ls = s - i;
  const double lr = r - j;
  const int square = j * n_ + i;
  ElementPoint ep;
  // Lower-right triangle (v00, v10, v11) holds ls >= lr.
  if (ls >= lr) {
    ep.element = 2 * square;
    ep.bary = {1.0 - ls, ls - lr, lr};
  } else {
    ep.element = 2 * square + 1;
    ep.bary = {1.0 - lr, ls, lr - ls};
  }
  return ep;
}

Mesh build_uniform_mesh(const MeshParams& params) {
  validate(params);
  Mesh m;
  m.h_ = params.h;
  m.ar_ = params.ar;
  m.n_ = static_cast<int>(std::lround(0.5 / params.h));
  const int n = m.n_;
  const int row = n + 1;

  m.vertices_.reserve(static_cast<std::size_t>(row) * row);
  m.vertex_tags_.reserve(static_cast<std::size_t>(row) * row);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      m.vertices_.push_back(m.lattice_point(i, j, n));
      TagSet tags = 0;
      if (i == 0) tags |= bit(BoundaryTag::SymX);
      if (j == 0) tags |= bit(BoundaryTag::SymY);
      if (i == n) tags |= bit(BoundaryTag::Clamp);
      if (j == n) tags |= bit(BoundaryTag::Free);
      m.vertex_tags_.push_back(tags);
    }
  }

  auto vid = [row](int i, int j) { return j * row + i; };
  m.triangles_.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      m.triangles_.push_back({v00, v10, v11});
      m.triangles_.push_back({v00, v11, v01});
    }
  }

  for (int i = 0; i < n; ++i) {
    m.boundary_edges_.push_back({{vid(i, 0), vid(i + 1, 0)}, BoundaryTag::SymY});
  }
  for (int j = 0; j < n; ++j) {
    m.boundary_edges_.push_back({{vid(n, j), vid(n, j + 1)}, BoundaryTag::Clamp});
  }
  for (int i = n; i > 0; --i) {
    m.boundary_edges_.push_back({{vid(i, n), vid(i - 1, n)}, BoundaryTag::Free});
  }
  for (int j = n; j > 0; --j) {
    m.boundary_edges_.push_back({{vid(0, j), vid(0, j - 1)}, BoundaryTag::SymX});
  }
  return m;
}

Mesh refine(const Mesh& mesh) {
  return build_uniform_mesh({mesh.h() / 2.0, mesh.ar()});
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_triangles()
     << '\n';
  os.precision(17);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point& p = mesh.vertices()[v];
    os << p.x << ' ' << p.y << ' ' << tag_name(mesh.vertex_tags()[v]) << '\n';
  }
  for (const auto& t : mesh.triangles()) {
    os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
}

}  // namespace lce
