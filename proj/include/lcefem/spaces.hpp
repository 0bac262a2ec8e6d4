#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lcefem/mesh.hpp"

namespace lce {

using Vector = Eigen::VectorXd;

/// Affine element data: area and the (constant) physical gradients of the
/// three barycentric coordinates.
struct ElementGeometry {
  double area = 0.0;
  std::array<std::array<double, 2>, 3> grad_bary{};
};

std::vector<ElementGeometry> element_geometry(const Mesh& mesh);

/// Shape functions on the unit triangle.  P2 ordering: vertices 0, 1, 2 then
/// midpoints of edges (1,2), (2,0), (0,1).
std::array<double, 3> p1_shape(const std::array<double, 3>& bary);
std::array<double, 6> p2_shape(const std::array<double, 3>& bary);

/// Physical gradients of the local shape functions at a barycentric point.
void shape_gradients(int degree, const ElementGeometry& geo,
                     const std::array<double, 3>& bary,
                     std::span<std::array<double, 2>> out);

/// Lagrange P1/P2 space with 1 or 2 components over a uniform mesh.  Global
/// scalar nodes are numbered row-major on the lattice of the space's nodes;
/// DOFs are component-blocked: dof(node, c) = c * num_nodes() + node.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree, int components);

  int degree() const { return degree_; }
  int components() const { return components_; }
  int nodes_per_element() const { return degree_ == 1 ? 3 : 6; }
  std::size_t num_nodes() const { return coords_.size(); }
  std::size_t num_dofs() const { return num_nodes() * components_; }
  int dof(int node, int component) const {
    return component * static_cast<int>(num_nodes()) + node;
  }

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const std::vector<Point>& node_coords() const { return coords_; }
  const std::vector<TagSet>& node_tags() const { return tags_; }
  std::span<const int> element_nodes(int element) const {
    return {elem_nodes_[static_cast<std::size_t>(element)].data(),
            static_cast<std::size_t>(nodes_per_element())};
  }
  const ElementGeometry& geometry(int element) const {
    return geometry_[static_cast<std::size_t>(element)];
  }
  std::size_t num_elements() const { return elem_nodes_.size(); }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int components_;
  std::vector<Point> coords_;
  std::vector<TagSet> tags_;
  std::vector<std::array<int, 6>> elem_nodes_;
  std::vector<ElementGeometry> geometry_;
};

/// Value and physical (X, Y) gradient of a finite element function.  For
/// scalar spaces only component 0 is meaningful.
struct FieldValue {
  std::array<double, 2> value{};
  std::array<std::array<double, 2>, 2> grad{};  // grad[c][d] = d value_c / d x_d
};

FieldValue evaluate(const FeSpace& space, const Vector& coeffs, int element,
                    const std::array<double, 3>& bary);

/// Evaluates at a physical point (locates the element first).
FieldValue evaluate_at(const FeSpace& space, const Vector& coeffs, double x, double y);

/// Nodal interpolation pi_h onto a scalar P1 space.  For Lagrange P1 the
/// coefficients are the nodal values themselves.
Vector nodal_interpolate(const FeSpace& p1_scalar, std::span<const double> point_values);

using VectorFunction = std::function<std::array<double, 2>(double, double)>;

/// Nodal interpolation of a closed-form field (component c of the result
/// is used for component c of the space).
Vector interpolate(const FeSpace& space, const VectorFunction& f);

/// Exact re-expression of a coarse function on the refined (nested) space.
/// Throws std::invalid_argument if the spaces are not nested refinements.
Vector transfer_to_refined(const FeSpace& coarse, const Vector& coarse_coeffs,
                           const FeSpace& fine);

/// Norms computed by element quadrature (degree-5 rule, exact for P2^2).
double l2_norm(const FeSpace& space, const Vector& coeffs);
double h1_seminorm(const FeSpace& space, const Vector& coeffs);
double h1_norm(const FeSpace& space, const Vector& coeffs);

/// Unknowns of the four-field problem at one continuation parameter.
struct FieldState {
  Vector u;       // P2, 2 components
  Vector n;       // P1, 2 components
  Vector p;       // P1 scalar
  Vector lambda;  // P1 scalar
  double t = 0.0;
};

/// `x y nx ny` per P1 node.
void write_director_field(std::ostream& os, const FeSpace& director_space,
                          const Vector& n);
/// `x y value` per node of a scalar space (or per node for nodal values).
void write_nodal_field(std::ostream& os, const FeSpace& space, std::span<const double> values);

}  // namespace lce
