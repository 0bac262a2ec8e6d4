#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcefem/assembly.hpp"
#include "lcefem/btw.hpp"
#include "lcefem/spaces.hpp"

namespace lce {

enum class LinearSolverKind { SparseLU, Umfpack };

/// Umfpack when the library was found at configure time, SparseLU otherwise.
LinearSolverKind default_linear_solver();
bool linear_solver_available(LinearSolverKind kind);
const char* linear_solver_name(LinearSolverKind kind);

struct SolverConfig {
  double newton_abs_tol = 1e-10;  // Euclidean norm of the free residual
  int newton_max_iter = 25;
  double dt_min = 0.01 / 16.0;
  double unit_tol = 1e-10;  // max over P1 nodes of ||n|^2 - 1|
  LinearSolverKind linear_solver = default_linear_solver();
};

/// Throws std::invalid_argument for tol <= 0, max_iter < 1 or dt_min
/// outside (0, dt].
void validate(const SolverConfig& config, const MaterialParams& params);

class SolverError : public std::runtime_error {
 public:
  enum class Kind { MaxIterations, SingularFactorization, ContinuationFailed };

  SolverError(Kind kind, double t, const std::string& what)
      : std::runtime_error(what), kind_(kind), t_(t) {}

  Kind kind() const { return kind_; }
  double t() const { return t_; }

 private:
  Kind kind_;
  double t_;
};

/// Prescribed values for constrained unknowns, as (global index, value).
using DirichletValues = std::vector<std::pair<int, double>>;

DirichletValues apply_boundary_conditions(const Spaces& spaces, const MaterialParams& params,
                                          double t);

/// Writes the prescribed values into the state.
void impose(const DirichletValues& bc, const Spaces& spaces, FieldState& s);

/// Nodal interpolation of the homogeneous stress-free state.
FieldState stress_free_field_state(const Spaces& spaces, const MaterialParams& params);

/// Sparse direct solver for the free Jacobian.  The symbolic analysis is kept
/// while the sparsity pattern stays the same.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverKind kind = default_linear_solver());
  ~LinearSolver();
  LinearSolver(const LinearSolver&) = delete;
  LinearSolver& operator=(const LinearSolver&) = delete;

  /// Returns false when the factorization fails.
  bool factorize(const SparseMatrix& K);
  Vector solve(const Vector& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct NewtonResult {
  FieldState state;
  int iterations = 0;
  std::vector<double> residual_history;  // norm before each correction, then final
};

/// Newton's method at fixed t.  The state must already carry the Dirichlet
/// values; corrections vanish on constrained unknowns.
NewtonResult newton_solve(const FieldState& state0, double t, const SolverConfig& config,
                          const MaterialParams& params, const Spaces& spaces);

/// Largest nodal deviation ||n_k|^2 - 1|.
double max_unit_defect(const FieldState& s, const Spaces& spaces);

/// Reaction force on the clamp edge turned into a nominal stress:
/// 2 * (sum of clamp u_X residual entries) / a^{-1/4}.
double nominal_stress(const FieldState& s, const Spaces& spaces, const MaterialParams& params);

struct TrajectoryRecord {
  double t = 0.0;
  double strain = 0.0;
  double elongation = 1.0;
  double nominal_stress = 0.0;
  double energy = 0.0;
  int newton_iterations = 0;
  FieldState state;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
};

/// Called after every accepted continuation step.
using StepObserver = std::function<void(const TrajectoryRecord&)>;

/// Continuation from the stress-free state at t = 0 to t = 1.  States are
/// recorded at t = k dt; a failed step is retried with halved substeps down
/// to dt_min, after which SolverError(ContinuationFailed) is thrown.
Trajectory continuation_run(const MaterialParams& params, const SolverConfig& config,
                            const Spaces& spaces, const StepObserver& observer = {});

/// `t,strain,elongation,nominal_stress,energy`
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace lce
