// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.  Detail lines are indented under each verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcefem/analytic_suite.hpp"
#include "lcefem/diagnostics.hpp"
#include "lcefem/experiment.hpp"
#include "lcefem/solver.hpp"

using namespace lce;

namespace {

// Reference values for the a = 0.6, b = 0.0015 pulling test.
constexpr double kB1T0[4] = {0.5836, 0.5875, 0.5879, 0.5880};
constexpr double kB1T1[4] = {0.6549, 0.6431, 0.6287, 0.6163};
constexpr double kB2T1[4] = {1.9967, 1.9503, 1.9065, 1.8711};
constexpr double kErrors[6][4] = {
    {3.49e-03, 1.91e-03, 8.39e-04, 2.69e-04},  // u L2
    {5.14e-02, 3.77e-02, 2.02e-02, 7.66e-03},  // u H1
    {2.32e-01, 9.70e-02, 3.05e-02, 8.25e-03},  // n L2
    {2.31e+00, 1.91e+00, 1.19e+00, 6.23e-01},  // n H1
    {1.68e-01, 7.93e-02, 2.38e-02, 8.99e-03},  // p L2
    {1.15e-02, 4.41e-03, 1.51e-03, 5.22e-04},  // lambda H-1
};
constexpr double kFinalRates[6] = {1.64, 1.40, 1.88, 0.93, 1.41, 1.54};

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    ok = ok && cond;
    detail << "    " << (cond ? "ok   " : "FAIL ") << what << '\n';
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.3e", x); }
std::string fix(double x) { return fmt("%.4f", x); }

int failures = 0;

void report(int id, const std::string& title, const Verdict& v) {
  std::cout << (v.ok ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << title << '\n'
            << v.detail.str() << std::flush;
  if (!v.ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FieldState stress_free(const Spaces& sp, const MaterialParams& P) {
  FieldState s = stress_free_field_state(sp, P);
  impose(apply_boundary_conditions(sp, P, 0.0), sp, s);
  return s;
}

// ------------------------------------------------------------------ 1
void criterion_analytic() {
  Verdict v;
  const AnalyticReport r = run_analytic_suites();  // 10^4 samples, a in {0.1, 0.3, 0.6, 0.9}
  for (const char* name : {"zero-set", "shear-family", "coercivity", "convexity", "non-convexity"}) {
    const SuiteResult s = r.summary(name);
    v.check(s.checks > 0 && s.failures == 0,
            std::string(name) + ": " + std::to_string(s.checks) + " checks, worst " + sci(s.worst));
  }
  bool dims[2] = {false, false};
  for (const auto& s : r.suites) dims[s.dim == 3] = true;
  v.check(dims[0] && dims[1], "suites cover 2D and 3D");
  v.check(r.passed(), "all suites: " + std::to_string(r.total_failures()) + " failures");
  report(1, "analytic suite", v);
}

// ------------------------------------------------------------------ 2
void criterion_stress_free(const MaterialParams& P) {
  Verdict v;
  for (int k = 2; k <= 5; ++k) {
    const auto sp = make_spaces({std::ldexp(1.0, -k), P.ar()});
    const FieldState s = stress_free(*sp, P);
    const double res = assemble_residual(s, P, *sp).norm();
    const double pk = max_piola_stress(s, P, *sp);
    v.check(res <= 1e-9 && pk <= 1e-10,
            "h=2^-" + std::to_string(k) + ": |R| = " + sci(res) + ", max|P| = " + sci(pk));
  }
  report(2, "stress-free equilibrium", v);
}

// ------------------------------------------------------------------ 3
void criterion_derivatives(const MaterialParams& P) {
  Verdict v;
  const auto sp = make_spaces({0.125, P.ar()});
  const DofLayout& L = sp->dofs;
  FieldState s = stress_free_field_state(*sp, P);
  impose(apply_boundary_conditions(*sp, P, 0.4), *sp, s);
  std::mt19937 rng(2024);
  std::normal_distribution<double> g;
  {
    Vector x = L.pack(s);
    for (auto& e : x) e += 0.05 * g(rng);
    L.unpack(x, s);
  }
  auto shifted = [&](const Vector& d, double eps) {
    FieldState o = s;
    L.unpack(L.pack(s) + eps * d, o);
    return o;
  };
  const Vector R = assemble_full_residual(s, P, *sp);
  const SparseMatrix J = assemble_full_jacobian(s, P, *sp);
  const double eps = 1e-6;
  double worst_g = 0.0, worst_j = 0.0;
  for (int k = 0; k < 50; ++k) {
    Vector d(L.total());
    for (auto& e : d) e = g(rng);
    d.normalize();
    const double fd = (lagrangian(shifted(d, eps), P, *sp) - lagrangian(shifted(d, -eps), P, *sp)) /
                      (2 * eps);
    worst_g = std::max(worst_g, std::abs(fd - R.dot(d)) / std::abs(R.dot(d)));
    const Vector fdj = (assemble_full_residual(shifted(d, eps), P, *sp) -
                        assemble_full_residual(shifted(d, -eps), P, *sp)) / (2 * eps);
    const Vector jd = J * d;
    worst_j = std::max(worst_j, (fdj - jd).norm() / jd.norm());
  }
  v.check(worst_g <= 1e-5, "residual vs FD gradient, worst relative " + sci(worst_g));
  v.check(worst_j <= 1e-5, "Jacobian vs FD residual, worst relative " + sci(worst_j));
  report(3, "derivative consistency", v);
}

// ------------------------------------------------------------------ 4, 5
void criterion_infsup_t0(const MaterialParams& P) {
  Verdict v;
  for (int k = 2; k <= 5; ++k) {
    const auto sp = make_spaces({std::ldexp(1.0, -k), P.ar()});
    const InfSupReport r = infsup_report(stress_free(*sp, P), P, *sp);
    const std::string h = "h=2^-" + std::to_string(k) + ": ";
    v.check(std::abs(r.beta_b2 - 2.0) <= 5e-4, h + "b2 = " + fix(r.beta_b2));
    v.check(std::abs(r.beta_b1 - kB1T0[k - 2]) <= 0.01,
            h + "b1 = " + fix(r.beta_b1) + " (reference " + fix(kB1T0[k - 2]) + ")");
    v.check(r.s_A_kerB > 0.0, h + "s(A|KerB) = " + sci(r.s_A_kerB) + " > 0");
    v.check(r.e_A_kerB < 0.0, h + "e(A|KerB) = " + sci(r.e_A_kerB) + " < 0");
    if (k == 2) {
      const double ratio = r.s_A_kerB / 3.60e-3;
      v.check(ratio >= 0.5 && ratio <= 2.0, h + "s / 3.60e-03 = " + fix(ratio));
    }
  }
  report(4, "inf-sup at t = 0", v);
}

void criterion_infsup_t1(const MaterialParams& P, const std::vector<std::shared_ptr<const Spaces>>& sp,
                         const std::vector<FieldState>& finals) {
  Verdict v;
  for (int i = 0; i < 4; ++i) {
    const InfSupReport r = infsup_report(finals[i], P, *sp[i]);
    const std::string h = "h=2^-" + std::to_string(i + 2) + ": ";
    v.check(std::abs(r.beta_b1 - kB1T1[i]) <= 0.02,
            h + "b1 = " + fix(r.beta_b1) + " (reference " + fix(kB1T1[i]) + ")");
    v.check(std::abs(r.beta_b2 - kB2T1[i]) <= 0.02,
            h + "b2 = " + fix(r.beta_b2) + " (reference " + fix(kB2T1[i]) + ")");
    v.check(r.s_A_kerB > 0.0, h + "s(A|KerB) = " + sci(r.s_A_kerB) + " > 0");
    v.check(r.e_A_kerB < 0.0, h + "e(A|KerB) = " + sci(r.e_A_kerB) + " < 0");
  }
  report(5, "inf-sup at t = 1", v);
}

// ------------------------------------------------------------------ 6
void criterion_convergence(const std::vector<std::shared_ptr<const Spaces>>& sp,
                           const std::vector<FieldState>& finals) {
  Verdict v;
  std::vector<ErrorRow> rows;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    rows.push_back(error_table(*sp[i], finals[i], *sp[i + 1], finals[i + 1]));
  }
  const auto rates = convergence_rates(rows);
  for (int q = 0; q < 6; ++q) {
    std::string line = std::string(kErrorLabels[q]) + ":";
    bool monotone = true, magnitude = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double e = rows[i].values()[q];
      line += " " + sci(e);
      if (i > 0) monotone = monotone && e < rows[i - 1].values()[q];
      const double ratio = e / kErrors[q][i];
      magnitude = magnitude && ratio >= 1.0 / 3.0 && ratio <= 3.0;
    }
    const double rate = rates.back().rates[q];
    v.check(monotone, line + " decreasing");
    v.check(magnitude, std::string(kErrorLabels[q]) + " within a factor 3 of the reference table");
    v.check(std::abs(rate - kFinalRates[q]) <= 0.4,
            std::string(kErrorLabels[q]) + " final rate " + fix(rate) + " (reference " +
                fix(kFinalRates[q]) + ")");
  }
  report(6, "convergence tables", v);
}

// ------------------------------------------------------------------ 7, 8
void criterion_plateau(const Trajectory& tr) {
  Verdict v;
  const double early = mean_slope(tr, 0.0, 0.06);
  const double plateau = mean_slope(tr, 0.12, 0.20);
  v.check(plateau < 0.4 * early,
          "mean slope on [0.12, 0.20] = " + fix(plateau) + ", on [0, 0.06] = " + fix(early));
  const double drop = max_stress_drop(tr);
  v.check(drop <= 1e-3, "largest stress drop below the running maximum = " + sci(drop));
  report(7, "semi-soft plateau", v);
}

void criterion_rotation(const Trajectory& tr, const Spaces& sp, const MaterialParams& P) {
  Verdict v;
  const auto& early = record_at(tr, stretch_to_t(1.10, P), P.dt).state;
  const auto& late = record_at(tr, stretch_to_t(1.40, P), P.dt).state;
  const double f1 = director_fraction(early, sp, 0.5);
  const double f2 = director_fraction(late, sp, 0.9);
  v.check(f1 < 0.2, "s=1.10: share of interior nodes with |n_x| > 0.5 = " + fix(f1));
  v.check(f2 > 0.6, "s=1.40: share of interior nodes with |n_x| > 0.9 = " + fix(f2));
  report(8, "director rotation", v);
}

// ------------------------------------------------------------------ 9
void criterion_oracles(const MaterialParams& P) {
  Verdict v;
  const auto sp = make_spaces({0.25, P.ar()});
  const FieldState s = stress_free(*sp, P);
  const SaddleMatrices m = assemble_saddle(s, P, *sp);
  auto oracle = [](const DenseMatrix& B, const DenseMatrix& S, const DenseMatrix& T) {
    const DenseMatrix X = B * T.ldlt().solve(B.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(0.5 * (X + X.transpose()), S);
    return std::sqrt(es.eigenvalues().minCoeff());
  };
  const double b1 = infsup_value(DenseMatrix(m.B1), DenseMatrix(m.S_p), DenseMatrix(m.T_u));
  const double o1 = oracle(DenseMatrix(m.B1), DenseMatrix(m.S_p), DenseMatrix(m.T_u));
  const double b2 = infsup_value(DenseMatrix(m.B2), m.S_lambda, DenseMatrix(m.T_n));
  const double o2 = oracle(DenseMatrix(m.B2), m.S_lambda, DenseMatrix(m.T_n));
  v.check(std::abs(b1 - o1) <= 1e-10 * o1, "b1 vs generalized eigenproblem, diff " + sci(b1 - o1));
  v.check(std::abs(b2 - o2) <= 1e-10 * o2, "b2 vs generalized eigenproblem, diff " + sci(b2 - o2));

  // B2 against 2 M_jk n_k with M assembled separately.
  const DofLayout& L = sp->dofs;
  std::vector<int> all(sp->lambda.num_dofs());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  const DenseMatrix M(assemble_gram(sp->lambda, GramKind::L2, all));
  const auto lam = L.free_local(Field::Lambda);
  const auto nf = L.free_local(Field::N);
  const int nodes = static_cast<int>(sp->n.num_nodes());
  const DenseMatrix B2(m.B2);
  double worst = 0.0;
  for (std::size_t r = 0; r < lam.size(); ++r) {
    for (std::size_t c = 0; c < nf.size(); ++c) {
      const int node = nf[c] % nodes, comp = nf[c] / nodes;
      const double direct = 2.0 * M(lam[r], node) * s.n[sp->n.dof(node, comp)];
      worst = std::max(worst, std::abs(B2(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - direct));
    }
  }
  v.check(worst <= 1e-14, "B2 vs direct mass-matrix formula, max diff " + sci(worst));

  // Quadrature norms against Gram quadratic forms on random coefficients.
  std::mt19937 rng(9);
  std::normal_distribution<double> g;
  double worst_norm = 0.0;
  for (const FeSpace* space : {&sp->u, &sp->n, &sp->p}) {
    Vector x(static_cast<Eigen::Index>(space->num_dofs()));
    for (auto& e : x) e = g(rng);
    std::vector<int> dofs(space->num_dofs());
    for (std::size_t i = 0; i < dofs.size(); ++i) dofs[i] = static_cast<int>(i);
    const double l2 = l2_norm(*space, x), h1 = h1_norm(*space, x);
    const double gl2 = x.dot(assemble_gram(*space, GramKind::L2, dofs) * x);
    const double gh1 = x.dot(assemble_gram(*space, GramKind::H1, dofs) * x);
    worst_norm = std::max({worst_norm, std::abs(l2 * l2 - gl2) / gl2, std::abs(h1 * h1 - gh1) / gh1});
  }
  v.check(worst_norm <= 1e-12, "quadrature vs Gram norms, worst relative " + sci(worst_norm));
  report(9, "oracle equivalences", v);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const MaterialParams P;  // a = 0.6, b = 0.0015, AR_n = 1, M = 0.4, dt = 0.01
  const SolverConfig C;

  criterion_analytic();
  criterion_stress_free(P);
  criterion_derivatives(P);
  criterion_oracles(P);
  criterion_infsup_t0(P);
  std::clog << "  [" << fix(seconds_since(t0)) << " s] continuation ladder 2^-2 .. 2^-6\n";

  std::vector<std::shared_ptr<const Spaces>> spaces;
  std::vector<FieldState> finals;
  Trajectory mid;  // h = 2^-4, kept for the plateau and rotation checks
  try {
    for (int k = 2; k <= 6; ++k) {
      spaces.push_back(make_spaces({std::ldexp(1.0, -k), P.ar()}));
      Trajectory tr = continuation_run(P, C, *spaces.back());
      finals.push_back(tr.records.back().state);
      if (k == 4) mid = std::move(tr);
      std::clog << "  [" << fix(seconds_since(t0)) << " s] h=2^-" << k << " done\n";
    }
  } catch (const SolverError& e) {
    std::cout << "[FAIL] continuation ladder: " << e.what() << '\n';
    return 1;
  }

  criterion_plateau(mid);
  criterion_rotation(mid, *spaces[2], P);
  criterion_convergence(spaces, finals);
  criterion_infsup_t1(P, spaces, finals);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " of 9 criteria failed")
            << " (" << fix(seconds_since(t0)) << " s)\n";
  return failures == 0 ? 0 : 1;
}
