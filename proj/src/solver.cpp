#include "lcefem/solver.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#if defined(LCEFEM_HAVE_UMFPACK)
#include <Eigen/UmfPackSupport>
#endif

namespace lce {

LinearSolverKind default_linear_solver() {
#if defined(LCEFEM_HAVE_UMFPACK)
  return LinearSolverKind::Umfpack;
#else
  return LinearSolverKind::SparseLU;
#endif
}

bool linear_solver_available(LinearSolverKind kind) {
#if defined(LCEFEM_HAVE_UMFPACK)
  (void)kind;
  return true;
#else
  return kind == LinearSolverKind::SparseLU;
#endif
}

const char* linear_solver_name(LinearSolverKind kind) {
  return kind == LinearSolverKind::Umfpack ? "umfpack" : "sparselu";
}

void validate(const SolverConfig& c, const MaterialParams& params) {
  if (!(c.newton_abs_tol > 0.0)) throw std::invalid_argument("solver: newton_abs_tol must be > 0");
  if (c.newton_max_iter < 1) throw std::invalid_argument("solver: newton_max_iter must be >= 1");
  if (!(c.dt_min > 0.0 && c.dt_min <= params.dt)) {
    throw std::invalid_argument("solver: dt_min must lie in (0, dt]");
  }
  if (!(c.unit_tol > 0.0)) throw std::invalid_argument("solver: unit_tol must be > 0");
  if (!linear_solver_available(c.linear_solver)) {
    throw std::invalid_argument(std::string("solver: linear solver not available: ") +
                                linear_solver_name(c.linear_solver));
  }
}

// ------------------------------------------------------- boundary conditions

DirichletValues apply_boundary_conditions(const Spaces& sp, const MaterialParams& params,
                                          double t) {
  const DofLayout& L = sp.dofs;
  const StressFreeState sf = stress_free_state(params);
  const double ar = sf.ar;
  const double clamp_ux = 0.5 * ar * (std::pow(params.a, 0.25) * (1.0 + params.M * t) - 1.0);
  const double sy = std::pow(params.a, -0.25) - 1.0;
  DirichletValues out;

  const int ou = L.offset(Field::U);
  for (std::size_t k = 0; k < sp.u.num_nodes(); ++k) {
    const TagSet tags = sp.u.node_tags()[k];
    const int node = static_cast<int>(k);
    const double y = sp.u.node_coords()[k].y;
    const bool clamp = has_tag(tags, BoundaryTag::Clamp);
    if (clamp) {
      out.emplace_back(ou + sp.u.dof(node, 0), clamp_ux);
      out.emplace_back(ou + sp.u.dof(node, 1), sy * (y - 0.5));
      continue;
    }
    if (has_tag(tags, BoundaryTag::SymX)) out.emplace_back(ou + sp.u.dof(node, 0), 0.0);
    if (has_tag(tags, BoundaryTag::SymY)) out.emplace_back(ou + sp.u.dof(node, 1), 0.0);
  }
  const int on = L.offset(Field::N), ol = L.offset(Field::Lambda);
  for (std::size_t k = 0; k < sp.n.num_nodes(); ++k) {
    const int node = static_cast<int>(k);
    if (!L.constrained(on + sp.n.dof(node, 0))) continue;
    out.emplace_back(on + sp.n.dof(node, 0), 0.0);
    out.emplace_back(on + sp.n.dof(node, 1), 1.0);
    out.emplace_back(ol + node, sf.lambda0);
  }
  return out;
}

void impose(const DirichletValues& bc, const Spaces& sp, FieldState& s) {
  check_state(s, sp);
  Vector full = sp.dofs.pack(s);
  for (const auto& [dof, value] : bc) full[dof] = value;
  sp.dofs.unpack(full, s);
}

FieldState stress_free_field_state(const Spaces& sp, const MaterialParams& params) {
  const StressFreeState sf = stress_free_state(params);
  FieldState s;
  s.u = interpolate(sp.u, [&sf](double x, double y) {
    const Vec2 d = sf.displacement(x, y);
    return std::array<double, 2>{d[0], d[1]};
  });
  s.n = interpolate(sp.n, [](double, double) { return std::array<double, 2>{0.0, 1.0}; });
  s.p = Vector::Constant(static_cast<Eigen::Index>(sp.p.num_dofs()), sf.p0);
  s.lambda = Vector::Constant(static_cast<Eigen::Index>(sp.lambda.num_dofs()), sf.lambda0);
  s.t = 0.0;
  return s;
}

// ------------------------------------------------------------- linear solve

struct LinearSolver::Impl {
  LinearSolverKind kind;
  SparseMatrix K;  // kept alive: umfpack reads the matrix during solves
  std::vector<int> outer, inner;
  bool analysed = false;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#if defined(LCEFEM_HAVE_UMFPACK)
  Eigen::UmfPackLU<SparseMatrix> umf;
#endif

  bool same_pattern(const SparseMatrix& m) const {
    if (!analysed || m.rows() != K.rows() || m.nonZeros() != K.nonZeros()) return false;
    return std::equal(outer.begin(), outer.end(), m.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), m.innerIndexPtr());
  }
};

LinearSolver::LinearSolver(LinearSolverKind kind) : impl_(std::make_unique<Impl>()) {
  if (!linear_solver_available(kind)) {
    throw std::invalid_argument("LinearSolver: requested backend not available");
  }
  impl_->kind = kind;
}

LinearSolver::~LinearSolver() = default;

bool LinearSolver::factorize(const SparseMatrix& Kin) {
  Impl& m = *impl_;
  SparseMatrix K = Kin;
  K.makeCompressed();
  const bool reuse = m.same_pattern(K);
  m.K = std::move(K);
  if (!reuse) {
    m.outer.assign(m.K.outerIndexPtr(), m.K.outerIndexPtr() + m.K.outerSize() + 1);
    m.inner.assign(m.K.innerIndexPtr(), m.K.innerIndexPtr() + m.K.nonZeros());
  }
#if defined(LCEFEM_HAVE_UMFPACK)
  if (m.kind == LinearSolverKind::Umfpack) {
    if (!reuse) m.umf.analyzePattern(m.K);
    m.analysed = true;
    m.umf.factorize(m.K);
    return m.umf.info() == Eigen::Success;
  }
#endif
  if (!reuse) m.lu.analyzePattern(m.K);
  m.analysed = true;
  m.lu.factorize(m.K);
  return m.lu.info() == Eigen::Success;
}

Vector LinearSolver::solve(const Vector& rhs) const {
#if defined(LCEFEM_HAVE_UMFPACK)
  if (impl_->kind == LinearSolverKind::Umfpack) return impl_->umf.solve(rhs);
#endif
  return impl_->lu.solve(rhs);
}

// ------------------------------------------------------------------- Newton

double max_unit_defect(const FieldState& s, const Spaces& sp) {
  double worst = 0.0;
  for (std::size_t k = 0; k < sp.n.num_nodes(); ++k) {
    const int node = static_cast<int>(k);
    const double x = s.n[sp.n.dof(node, 0)], y = s.n[sp.n.dof(node, 1)];
    worst = std::max(worst, std::abs(x * x + y * y - 1.0));
  }
  return worst;
}

namespace {

std::string at_t(const std::string& what, double t) {
  std::ostringstream os;
  os.precision(10);
  os << what << " at t = " << t;
  return os.str();
}

NewtonResult newton_impl(const FieldState& state0, double t, const SolverConfig& config,
                         const MaterialParams& params, const Spaces& sp, LinearSolver& lin) {
  NewtonResult res;
  res.state = state0;
  res.state.t = t;
  for (int it = 0;; ++it) {
    const Vector R = assemble_residual(res.state, params, sp);
    const double norm = R.norm();
    res.residual_history.push_back(norm);
    if (!std::isfinite(norm)) {
      throw SolverError(SolverError::Kind::MaxIterations, t, at_t("Newton diverged", t));
    }
    if (norm <= config.newton_abs_tol && max_unit_defect(res.state, sp) <= config.unit_tol) {
      res.iterations = it;
      return res;
    }
    if (it == config.newton_max_iter) break;
    if (!lin.factorize(assemble_jacobian(res.state, params, sp))) {
      throw SolverError(SolverError::Kind::SingularFactorization, t,
                        at_t("singular Jacobian factorization", t));
    }
    const Vector dx = lin.solve(-R);
    if (!dx.allFinite()) {
      throw SolverError(SolverError::Kind::SingularFactorization, t,
                        at_t("non-finite Newton correction", t));
    }
    sp.dofs.add_free(dx, res.state);
  }
  throw SolverError(SolverError::Kind::MaxIterations, t,
                    at_t("Newton did not converge in " + std::to_string(config.newton_max_iter) +
                             " iterations",
                         t));
}

}  // namespace

NewtonResult newton_solve(const FieldState& state0, double t, const SolverConfig& config,
                          const MaterialParams& params, const Spaces& sp) {
  check_state(state0, sp);
  LinearSolver lin(config.linear_solver);
  return newton_impl(state0, t, config, params, sp, lin);
}

double nominal_stress(const FieldState& s, const Spaces& sp, const MaterialParams& params) {
  const Vector R = assemble_full_residual(s, params, sp);
  const int ou = sp.dofs.offset(Field::U);
  double force = 0.0;
  for (std::size_t k = 0; k < sp.u.num_nodes(); ++k) {
    if (has_tag(sp.u.node_tags()[k], BoundaryTag::Clamp)) {
      force += R[ou + sp.u.dof(static_cast<int>(k), 0)];
    }
  }
  return 2.0 * force / std::pow(params.a, -0.25);
}

// ------------------------------------------------------------- continuation

namespace {

TrajectoryRecord make_record(const FieldState& s, int iterations, const Spaces& sp,
                             const MaterialParams& params) {
  TrajectoryRecord r;
  r.t = s.t;
  r.strain = params.M * s.t;
  r.elongation = 1.0 + r.strain;
  r.nominal_stress = nominal_stress(s, sp, params);
  r.energy = stored_energy(s, params, sp);
  r.newton_iterations = iterations;
  r.state = s;
  return r;
}

}  // namespace

Trajectory continuation_run(const MaterialParams& params, const SolverConfig& config,
                            const Spaces& sp, const StepObserver& observer) {
  validate(params);
  validate(config, params);
  LinearSolver lin(config.linear_solver);
  Trajectory traj;

  FieldState cur = stress_free_field_state(sp, params);
  impose(apply_boundary_conditions(sp, params, 0.0), sp, cur);
  NewtonResult first = newton_impl(cur, 0.0, config, params, sp, lin);
  cur = first.state;
  traj.records.push_back(make_record(cur, first.iterations, sp, params));
  if (observer) observer(traj.records.back());

  const int steps = static_cast<int>(std::ceil(1.0 / params.dt - 1e-9));
  for (int k = 1; k <= steps; ++k) {
    const double target = k == steps ? 1.0 : k * params.dt;
    double t = cur.t;
    double h = target - t;
    int iterations = 0;
    while (t < target) {
      const double tn = (t + h >= target - 1e-14) ? target : t + h;
      FieldState trial = cur;
      impose(apply_boundary_conditions(sp, params, tn), sp, trial);
      try {
        NewtonResult r = newton_impl(trial, tn, config, params, sp, lin);
        cur = std::move(r.state);
        t = tn;
        iterations += r.iterations;
      } catch (const SolverError& e) {
        h *= 0.5;
        if (h < config.dt_min * (1.0 - 1e-12)) {
          throw SolverError(SolverError::Kind::ContinuationFailed, tn,
                            at_t(std::string("continuation failed (") + e.what() + ")", tn));
        }
      }
    }
    traj.records.push_back(make_record(cur, iterations, sp, params));
    if (observer) observer(traj.records.back());
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,strain,elongation,nominal_stress,energy\n";
  os.precision(12);
  for (const auto& r : traj.records) {
    os << r.t << ',' << r.strain << ',' << r.elongation << ',' << r.nominal_stress << ','
       << r.energy << '\n';
  }
}

}  // namespace lce
