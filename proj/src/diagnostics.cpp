#include "lcefem/diagnostics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

namespace lce {

namespace {

// Spectral S^{-1/2}; rejects non-SPD input.
DenseMatrix inverse_sqrt(const DenseMatrix& S, const char* what) {
  if (S.rows() != S.cols()) throw std::invalid_argument(std::string(what) + ": not square");
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  const double scale = S.cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) throw std::invalid_argument(std::string(what) + ": not symmetric");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (S + S.transpose()));
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument(std::string(what) + ": not positive definite");
  }
  return es.operatorInverseSqrt();
}

DenseMatrix block_diag(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out = DenseMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

double infsup_value(const DenseMatrix& B, const DenseMatrix& S, const DenseMatrix& T) {
  if (B.rows() != S.rows() || B.cols() != T.rows()) {
    throw std::invalid_argument("infsup_value: dimension mismatch");
  }
  const DenseMatrix X = inverse_sqrt(S, "infsup_value: S") * B * inverse_sqrt(T, "infsup_value: T");
  if (B.rows() > B.cols()) return 0.0;  // more multipliers than primal unknowns
  Eigen::BDCSVD<DenseMatrix> svd(X);
  const auto& sv = svd.singularValues();
  return sv[sv.size() - 1];
}

KernelSpectrum kernel_restricted(const DenseMatrix& A, const DenseMatrix& B, const DenseMatrix& T) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.rows();
  if (A.cols() != n || B.cols() != n || T.rows() != n || T.cols() != n) {
    throw std::invalid_argument("kernel_restricted: dimension mismatch");
  }
  const DenseMatrix Tis = inverse_sqrt(T, "kernel_restricted: T");
  const DenseMatrix Ct = (B * Tis).transpose();  // n x m
  Eigen::HouseholderQR<DenseMatrix> qr(Ct);
  const DenseMatrix R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const double rmax = R.diagonal().cwiseAbs().maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(R(i, i)) > 1e-10 * rmax) ++rank;
  }
  if (rank < m) {
    throw std::runtime_error("kernel_restricted: constraint matrix is rank deficient (rank " +
                             std::to_string(rank) + " of " + std::to_string(m) + ")");
  }
  const DenseMatrix Q = qr.householderQ() * DenseMatrix::Identity(n, n);
  const DenseMatrix Q2 = Q.rightCols(n - m);
  const DenseMatrix W = Tis * Q2;
  DenseMatrix A1 = W.transpose() * A * W;
  A1 = 0.5 * (A1 + A1.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(A1, Eigen::EigenvaluesOnly);
  KernelSpectrum out;
  out.kernel_dim = static_cast<int>(n - m);
  out.e = es.eigenvalues().minCoeff();
  out.s = es.eigenvalues().cwiseAbs().minCoeff();
  return out;
}

InfSupReport infsup_report(const SaddleMatrices& m, double h, double t) {
  InfSupReport r;
  r.h = h;
  r.t = t;
  const DenseMatrix Tu(m.T_u), Tn(m.T_n), Sp(m.S_p), B1(m.B1), B2(m.B2);
  r.beta_b1 = infsup_value(B1, Sp, Tu);
  r.beta_b2 = infsup_value(B2, m.S_lambda, Tn);
  const DenseMatrix B = block_diag(B1, B2);
  const KernelSpectrum ks = kernel_restricted(DenseMatrix(m.A), B, block_diag(Tu, Tn));
  r.s_A_kerB = ks.s;
  r.e_A_kerB = ks.e;
  return r;
}

InfSupReport infsup_report(const FieldState& s, const MaterialParams& params,
                           const Spaces& spaces) {
  return infsup_report(assemble_saddle(s, params, spaces), spaces.mesh->h(), s.t);
}

// -------------------------------------------------------------- error table

ErrorRow error_table(const Spaces& coarse, const FieldState& cs, const Spaces& fine,
                     const FieldState& fs) {
  check_state(cs, coarse);
  check_state(fs, fine);
  ErrorRow row;
  row.h = coarse.mesh->h();
  const Vector du = transfer_to_refined(coarse.u, cs.u, fine.u) - fs.u;
  const Vector dn = transfer_to_refined(coarse.n, cs.n, fine.n) - fs.n;
  const Vector dp = transfer_to_refined(coarse.p, cs.p, fine.p) - fs.p;
  const Vector dl = transfer_to_refined(coarse.lambda, cs.lambda, fine.lambda) - fs.lambda;
  row.u_l2 = l2_norm(fine.u, du);
  row.u_h1 = h1_norm(fine.u, du);
  row.n_l2 = l2_norm(fine.n, dn);
  row.n_h1 = h1_norm(fine.n, dn);
  row.p_l2 = l2_norm(fine.p, dp);
  const std::vector<int> free = fine.dofs.free_local(Field::Lambda);
  const DenseMatrix S = assemble_hminus1_gram(fine.lambda, free);
  Vector d(static_cast<Eigen::Index>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i) d[static_cast<Eigen::Index>(i)] = dl[free[i]];
  row.lambda_hm1 = std::sqrt(std::max(0.0, d.dot(S * d)));
  return row;
}

std::vector<RateRow> convergence_rates(const std::vector<ErrorRow>& rows) {
  std::vector<RateRow> out;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    RateRow r;
    r.h = rows[k + 1].h;
    const auto a = rows[k].values();
    const auto b = rows[k + 1].values();
    for (int i = 0; i < 6; ++i) {
      if (a[i] == 0.0 || b[i] == 0.0) {
        throw std::domain_error("convergence_rates: zero error in row " +
                                std::string(kErrorLabels[i]));
      }
      r.rates[i] = std::log2(a[i] / b[i]);
    }
    out.push_back(r);
  }
  return out;
}

void write_errors_csv(std::ostream& os, const std::vector<ErrorRow>& rows) {
  os << "norm";
  for (const auto& r : rows) os << ',' << r.h;
  os << '\n';
  os.precision(6);
  os << std::scientific;
  for (int i = 0; i < 6; ++i) {
    os << kErrorLabels[i];
    for (const auto& r : rows) os << ',' << r.values()[i];
    os << '\n';
  }
  os << std::defaultfloat;
}

void write_rates_csv(std::ostream& os, const std::vector<RateRow>& rows) {
  os << "norm";
  for (const auto& r : rows) os << ',' << r.h;
  os << '\n';
  if (rows.empty()) return;
  os.precision(4);
  for (int i = 0; i < 6; ++i) {
    os << kErrorLabels[i];
    for (const auto& r : rows) os << ',' << r.rates[i];
    os << '\n';
  }
}

void write_infsup_csv(std::ostream& os, const std::vector<InfSupReport>& rows) {
  os << "quantity";
  for (const auto& r : rows) os << ',' << r.h;
  os << '\n';
  os.precision(6);
  os << std::scientific;
  const char* labels[4] = {"b1", "b2", "s_A_kerB", "e_A_kerB"};
  for (int i = 0; i < 4; ++i) {
    os << labels[i];
    for (const auto& r : rows) {
      const double v[4] = {r.beta_b1, r.beta_b2, r.s_A_kerB, r.e_A_kerB};
      os << ',' << v[i];
    }
    os << '\n';
  }
  os << std::defaultfloat;
}

}  // namespace lce
