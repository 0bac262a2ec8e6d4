#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lcefem/btw.hpp"
#include "lcefem/mesh.hpp"
#include "lcefem/quadrature.hpp"
#include "lcefem/spaces.hpp"

namespace lce {

using SparseMatrix = Eigen::SparseMatrix<double>;
using DenseMatrix = Eigen::MatrixXd;

enum class Field { U = 0, N = 1, P = 2, Lambda = 3 };

/// Global unknown numbering u | n | p | lambda and the Dirichlet mask.
///
/// The mask depends only on boundary tags, never on t: SymX fixes u_X, SymY
/// fixes u_Y, Clamp fixes both u components, and n and lambda are fixed on all
/// three of them.  The pressure is never constrained.  Free unknowns keep the
/// global (block) order, so free vectors are also laid out u | n | p | lambda.
class DofLayout {
 public:
  DofLayout(const FeSpace& u, const FeSpace& n, const FeSpace& p, const FeSpace& lambda);

  int offset(Field f) const { return offset_[static_cast<int>(f)]; }
  int size(Field f) const { return size_[static_cast<int>(f)]; }
  int total() const { return offset_[3] + size_[3]; }

  bool constrained(int global) const { return free_index_[global] < 0; }
  /// -1 for constrained unknowns.
  int free_index(int global) const { return free_index_[global]; }
  const std::vector<int>& free_dofs() const { return free_; }
  int num_free() const { return static_cast<int>(free_.size()); }

  int free_offset(Field f) const { return free_offset_[static_cast<int>(f)]; }
  int free_size(Field f) const { return free_size_[static_cast<int>(f)]; }
  /// Field-local indices of the free unknowns of one field, increasing.
  std::vector<int> free_local(Field f) const;

  Vector pack(const FieldState& s) const;
  void unpack(const Vector& full, FieldState& s) const;
  Vector restrict_to_free(const Vector& full) const;
  /// s += delta on free unknowns; constrained entries are untouched.
  void add_free(const Vector& delta, FieldState& s) const;

 private:
  int offset_[4]{};
  int size_[4]{};
  int free_offset_[4]{};
  int free_size_[4]{};
  std::vector<int> free_index_;
  std::vector<int> free_;
};

/// The four finite element spaces on one mesh: P2^2 displacement, P1^2
/// director, P1 pressure and P1 unit-length multiplier.
struct Spaces {
  explicit Spaces(std::shared_ptr<const Mesh> mesh);

  std::shared_ptr<const Mesh> mesh;
  FeSpace u;
  FeSpace n;
  FeSpace p;
  FeSpace lambda;
  DofLayout dofs;
  SparseMatrix p1_mass;  // consistent scalar P1 mass matrix, all nodes
};

std::shared_ptr<const Spaces> make_spaces(const MeshParams& mesh_params);

/// Zero-initialised state with coefficient vectors of the right length.
FieldState zero_state(const Spaces& spaces);

/// Throws std::invalid_argument when coefficient lengths do not match.
void check_state(const FieldState& s, const Spaces& spaces);

/// Discrete equilibrium residual over all unknowns (no elimination).  The
/// nodal-interpolation terms of the director equation and the unit-length
/// constraint are applied through the P1 mass matrix acting on nodal values.
Vector assemble_full_residual(const FieldState& s, const MaterialParams& params,
                              const Spaces& spaces,
                              const TriangleRule& rule = triangle_rule_degree5());

/// Residual restricted to free unknowns.
Vector assemble_residual(const FieldState& s, const MaterialParams& params, const Spaces& spaces,
                         const TriangleRule& rule = triangle_rule_degree5());

/// Hessian of the Lagrangian over all unknowns.  The sparsity pattern depends
/// only on the mesh, so it can be reused across Newton steps.
SparseMatrix assemble_full_jacobian(const FieldState& s, const MaterialParams& params,
                                    const Spaces& spaces,
                                    const TriangleRule& rule = triangle_rule_degree5());

/// Jacobian with constrained rows and columns removed.
SparseMatrix assemble_jacobian(const FieldState& s, const MaterialParams& params,
                               const Spaces& spaces,
                               const TriangleRule& rule = triangle_rule_degree5());

/// Lagrangian whose gradient is the full residual:
/// int |F|^2 - (1-a)|F^T n|^2 - 2 sqrt(a) + b|grad n|^2 - p (det F - 1)
///   + lambda^T M (|n_k|^2 - 1) - int f.u - int_{Y=1} g.u
double lagrangian(const FieldState& s, const MaterialParams& params, const Spaces& spaces,
                  const TriangleRule& rule = triangle_rule_degree5());

/// Stored energy int W_BTW + b |grad n|^2 over the quarter domain.
double stored_energy(const FieldState& s, const MaterialParams& params, const Spaces& spaces);

/// BTW energy density per P1 node, averaged over the elements sharing it.
/// The director is normalised pointwise before evaluation.
std::vector<double> nodal_btw_density(const FieldState& s, const MaterialParams& params,
                                      const Spaces& spaces);

/// Largest Frobenius norm of the Piola stress over all quadrature points.
double max_piola_stress(const FieldState& s, const MaterialParams& params, const Spaces& spaces);

/// Restriction of a sparse matrix to the given rows and columns.
SparseMatrix select(const SparseMatrix& m, const std::vector<int>& rows,
                    const std::vector<int>& cols);

enum class GramKind { L2, H1 };

/// L2 mass or full H1 (mass + stiffness) Gram matrix of a space, restricted
/// to the given field-local DOFs.  Vector spaces are block diagonal.
SparseMatrix assemble_gram(const FeSpace& space, GramKind kind, const std::vector<int>& dofs);

/// H^-1 Gram A B^-1 A of a scalar P1 space with A, B its L2 and H1 Grams on
/// the given DOFs.
DenseMatrix assemble_hminus1_gram(const FeSpace& space, const std::vector<int>& dofs);

/// Constraint blocks: B1 (pressure x free u) and B2 (free lambda x free n),
/// identical to the corresponding Jacobian blocks.
struct ConstraintBlocks {
  SparseMatrix B1;
  SparseMatrix B2;
};

ConstraintBlocks assemble_constraint_blocks(const FieldState& s, const MaterialParams& params,
                                            const Spaces& spaces);

/// Matrices of the linearised saddle system on free unknowns.
struct SaddleMatrices {
  SparseMatrix K;    // (u, n, p, lambda) Jacobian
  Vector R;          // residual
  SparseMatrix T_u;  // H1 Gram, free u
  SparseMatrix T_n;  // H1 Gram, free n
  SparseMatrix S_p;  // L2 mass, pressure
  DenseMatrix S_lambda;  // H^-1 Gram, free lambda
  SparseMatrix B1;
  SparseMatrix B2;
  SparseMatrix A;    // primal (u, n) block of K
};

SaddleMatrices assemble_saddle(const FieldState& s, const MaterialParams& params,
                               const Spaces& spaces);

/// Coordinate dump: one `row col value` line per stored entry.
void write_matrix(std::ostream& os, const SparseMatrix& m);

}  // namespace lce
