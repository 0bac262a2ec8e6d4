#include "lcefem/spaces.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "lcefem/quadrature.hpp"

namespace lce {

std::vector<ElementGeometry> element_geometry(const Mesh& mesh) {
  std::vector<ElementGeometry> out;
  out.reserve(mesh.num_triangles());
  for (const auto& t : mesh.triangles()) {
    const Point& p0 = mesh.vertices()[t[0]];
    const Point& p1 = mesh.vertices()[t[1]];
    const Point& p2 = mesh.vertices()[t[2]];
    const double j11 = p1.x - p0.x, j12 = p2.x - p0.x;
    const double j21 = p1.y - p0.y, j22 = p2.y - p0.y;
    const double det = j11 * j22 - j12 * j21;
    ElementGeometry g;
    g.area = 0.5 * det;
    // Rows of J^{-1} are the gradients of L1 and L2.
    g.grad_bary[1] = {j22 / det, -j12 / det};
    g.grad_bary[2] = {-j21 / det, j11 / det};
    g.grad_bary[0] = {-g.grad_bary[1][0] - g.grad_bary[2][0],
                      -g.grad_bary[1][1] - g.grad_bary[2][1]};
    out.push_back(g);
  }
  return out;
}

std::array<double, 3> p1_shape(const std::array<double, 3>& b) { return b; }

std::array<double, 6> p2_shape(const std::array<double, 3>& b) {
  return {b[0] * (2.0 * b[0] - 1.0), b[1] * (2.0 * b[1] - 1.0), b[2] * (2.0 * b[2] - 1.0),
          4.0 * b[1] * b[2],         4.0 * b[2] * b[0],         4.0 * b[0] * b[1]};
}

void shape_gradients(int degree, const ElementGeometry& geo, const std::array<double, 3>& b,
                     std::span<std::array<double, 2>> out) {
  const auto& g = geo.grad_bary;
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) out[i] = g[i];
    return;
  }
  for (int i = 0; i < 3; ++i) {
    const double s = 4.0 * b[i] - 1.0;
    out[i] = {s * g[i][0], s * g[i][1]};
  }
  constexpr int edge[3][2] = {{1, 2}, {2, 0}, {0, 1}};
  for (int e = 0; e < 3; ++e) {
    const int i = edge[e][0], j = edge[e][1];
    out[3 + e] = {4.0 * (b[j] * g[i][0] + b[i] * g[j][0]),
                  4.0 * (b[j] * g[i][1] + b[i] * g[j][1])};
  }
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree, int components)
    : mesh_(std::move(mesh)), degree_(degree), components_(components) {
  if (!mesh_) throw std::invalid_argument("FeSpace: null mesh");
  if (degree_ != 1 && degree_ != 2) throw std::invalid_argument("FeSpace: degree must be 1 or 2");
  if (components_ != 1 && components_ != 2) {
    throw std::invalid_argument("FeSpace: components must be 1 or 2");
  }
  const int n = mesh_->cells_per_side();
  const int div = degree_ * n;  // lattice intervals per side
  const int row = div + 1;
  coords_.reserve(static_cast<std::size_t>(row) * row);
  tags_.reserve(static_cast<std::size_t>(row) * row);
  for (int j = 0; j <= div; ++j) {
    for (int i = 0; i <= div; ++i) {
      coords_.push_back(mesh_->lattice_point(i, j, div));
      TagSet tags = 0;
      if (i == 0) tags |= bit(BoundaryTag::SymX);
      if (j == 0) tags |= bit(BoundaryTag::SymY);
      if (i == div) tags |= bit(BoundaryTag::Clamp);
      if (j == div) tags |= bit(BoundaryTag::Free);
      tags_.push_back(tags);
    }
  }
  const int vrow = n + 1;
  auto lattice = [&](int v) {
    const int vi = v % vrow, vj = v / vrow;
    return std::array<int, 2>{degree_ * vi, degree_ * vj};
  };
  elem_nodes_.reserve(mesh_->num_triangles());
  for (const auto& t : mesh_->triangles()) {
    std::array<int, 6> nodes{-1, -1, -1, -1, -1, -1};
    std::array<std::array<int, 2>, 3> ij{lattice(t[0]), lattice(t[1]), lattice(t[2])};
    for (int k = 0; k < 3; ++k) nodes[k] = ij[k][1] * row + ij[k][0];
    if (degree_ == 2) {
      constexpr int edge[3][2] = {{1, 2}, {2, 0}, {0, 1}};
      for (int e = 0; e < 3; ++e) {
        const auto& a = ij[edge[e][0]];
        const auto& b = ij[edge[e][1]];
        nodes[3 + e] = ((a[1] + b[1]) / 2) * row + (a[0] + b[0]) / 2;
      }
    }
    elem_nodes_.push_back(nodes);
  }
  geometry_ = element_geometry(*mesh_);
}

FieldValue evaluate(const FeSpace& space, const Vector& coeffs, int element,
                    const std::array<double, 3>& bary) {
  if (element < 0 || static_cast<std::size_t>(element) >= space.num_elements()) {
    throw std::out_of_range("evaluate: element index out of range");
  }
  if (static_cast<std::size_t>(coeffs.size()) != space.num_dofs()) {
    throw std::invalid_argument("evaluate: coefficient vector length mismatch");
  }
  const auto nodes = space.element_nodes(element);
  const int nloc = space.nodes_per_element();
  std::array<double, 6> phi{};
  if (space.degree() == 1) {
    const auto v = p1_shape(bary);
    std::copy(v.begin(), v.end(), phi.begin());
  } else {
    phi = p2_shape(bary);
  }
  std::array<std::array<double, 2>, 6> dphi{};
  shape_gradients(space.degree(), space.geometry(element), bary, dphi);

  FieldValue out;
  for (int c = 0; c < space.components(); ++c) {
    for (int k = 0; k < nloc; ++k) {
      const double cf = coeffs[space.dof(nodes[k], c)];
      out.value[c] += cf * phi[k];
      out.grad[c][0] += cf * dphi[k][0];
      out.grad[c][1] += cf * dphi[k][1];
    }
  }
  return out;
}

FieldValue evaluate_at(const FeSpace& space, const Vector& coeffs, double x, double y) {
  const ElementPoint ep = space.mesh().locate(x, y);
  return evaluate(space, coeffs, ep.element, ep.bary);
}

Vector nodal_interpolate(const FeSpace& p1_scalar, std::span<const double> point_values) {
  if (p1_scalar.degree() != 1 || p1_scalar.components() != 1) {
    throw std::invalid_argument("nodal_interpolate: expects a scalar P1 space");
  }
  if (point_values.size() != p1_scalar.num_nodes()) {
    throw std::invalid_argument("nodal_interpolate: one value per P1 node required");
  }
  return Eigen::Map<const Vector>(point_values.data(),
                                  static_cast<Eigen::Index>(point_values.size()));
}

Vector interpolate(const FeSpace& space, const VectorFunction& f) {
  Vector out(static_cast<Eigen::Index>(space.num_dofs()));
  const auto& xy = space.node_coords();
  for (std::size_t k = 0; k < xy.size(); ++k) {
    const auto v = f(xy[k].x, xy[k].y);
    for (int c = 0; c < space.components(); ++c) out[space.dof(static_cast<int>(k), c)] = v[c];
  }
  return out;
}

Vector transfer_to_refined(const FeSpace& coarse, const Vector& coarse_coeffs,
                           const FeSpace& fine) {
  const Mesh& cm = coarse.mesh();
  const Mesh& fm = fine.mesh();
  if (coarse.degree() != fine.degree() || coarse.components() != fine.components() ||
      fm.cells_per_side() != 2 * cm.cells_per_side() || fm.ar() != cm.ar()) {
    throw std::invalid_argument("transfer_to_refined: spaces are not nested refinements");
  }
  Vector out(static_cast<Eigen::Index>(fine.num_dofs()));
  const auto& xy = fine.node_coords();
  for (std::size_t k = 0; k < xy.size(); ++k) {
    const FieldValue v = evaluate_at(coarse, coarse_coeffs, xy[k].x, xy[k].y);
    for (int c = 0; c < fine.components(); ++c) out[fine.dof(static_cast<int>(k), c)] = v.value[c];
  }
  return out;
}

namespace {

template <class Integrand>
double integrate_field(const FeSpace& space, const Vector& coeffs, Integrand&& f) {
  const TriangleRule& rule = triangle_rule_degree5();
  double sum = 0.0;
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const double area = space.geometry(static_cast<int>(e)).area;
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      local += rule.weights[q] * f(evaluate(space, coeffs, static_cast<int>(e), rule.points[q]));
    }
    sum += area * local;
  }
  return sum;
}

}  // namespace

double l2_norm(const FeSpace& space, const Vector& coeffs) {
  const int nc = space.components();
  return std::sqrt(integrate_field(space, coeffs, [nc](const FieldValue& v) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) s += v.value[c] * v.value[c];
    return s;
  }));
}

double h1_seminorm(const FeSpace& space, const Vector& coeffs) {
  const int nc = space.components();
  return std::sqrt(integrate_field(space, coeffs, [nc](const FieldValue& v) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) s += v.grad[c][0] * v.grad[c][0] + v.grad[c][1] * v.grad[c][1];
    return s;
  }));
}

double h1_norm(const FeSpace& space, const Vector& coeffs) {
  const double l2 = l2_norm(space, coeffs);
  const double semi = h1_seminorm(space, coeffs);
  return std::sqrt(l2 * l2 + semi * semi);
}

void write_director_field(std::ostream& os, const FeSpace& space, const Vector& n) {
  if (space.components() != 2 || static_cast<std::size_t>(n.size()) != space.num_dofs()) {
    throw std::invalid_argument("write_director_field: expects a 2-component field");
  }
  os.precision(12);
  const auto& xy = space.node_coords();
  for (std::size_t k = 0; k < xy.size(); ++k) {
    const int node = static_cast<int>(k);
    os << xy[k].x << ' ' << xy[k].y << ' ' << n[space.dof(node, 0)] << ' '
       << n[space.dof(node, 1)] << '\n';
  }
}

void write_nodal_field(std::ostream& os, const FeSpace& space, std::span<const double> values) {
  if (values.size() != space.num_nodes()) {
    throw std::invalid_argument("write_nodal_field: one value per node required");
  }
  os.precision(12);
  const auto& xy = space.node_coords();
  for (std::size_t k = 0; k < xy.size(); ++k) {
    os << xy[k].x << ' ' << xy[k].y << ' ' << values[k] << '\n';
  }
}

}  // namespace lce
