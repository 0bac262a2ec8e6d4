#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcefem/assembly.hpp"
#include "lcefem/spaces.hpp"

namespace lce {

/// Smallest singular value of S^{-1/2} B T^{-1/2} (B is multiplier x primal),
/// with symmetric square roots from spectral decompositions.  Throws
/// std::invalid_argument when S or T is not symmetric positive definite.
double infsup_value(const DenseMatrix& B, const DenseMatrix& S, const DenseMatrix& T);

struct KernelSpectrum {
  double s = 0.0;  // smallest singular value of A1
  double e = 0.0;  // smallest eigenvalue of A1
  int kernel_dim = 0;
};

/// A1 is the lower-right corner of Q^T T^{-1/2} A T^{-1/2} Q with Q from the
/// QR decomposition of (B T^{-1/2})^T.  Throws std::runtime_error with the
/// numerical rank when B is rank deficient.
KernelSpectrum kernel_restricted(const DenseMatrix& A, const DenseMatrix& B, const DenseMatrix& T);

struct InfSupReport {
  double h = 0.0;
  double t = 0.0;
  double beta_b1 = 0.0;
  double beta_b2 = 0.0;
  double s_A_kerB = 0.0;
  double e_A_kerB = 0.0;
};

InfSupReport infsup_report(const SaddleMatrices& m, double h, double t);
InfSupReport infsup_report(const FieldState& s, const MaterialParams& params,
                           const Spaces& spaces);

/// Differences between a coarse solution and its refinement, measured on the
/// fine mesh after exact transfer of the coarse fields.
struct ErrorRow {
  double h = 0.0;  // coarse mesh size
  double u_l2 = 0.0;
  double u_h1 = 0.0;
  double n_l2 = 0.0;
  double n_h1 = 0.0;
  double p_l2 = 0.0;
  double lambda_hm1 = 0.0;

  std::array<double, 6> values() const { return {u_l2, u_h1, n_l2, n_h1, p_l2, lambda_hm1}; }
};

inline constexpr std::array<const char*, 6> kErrorLabels = {"u_L2", "u_H1", "n_L2",
                                                            "n_H1", "p_L2", "lambda_Hm1"};

/// Throws std::invalid_argument when the meshes are not nested.
ErrorRow error_table(const Spaces& coarse, const FieldState& coarse_state, const Spaces& fine,
                     const FieldState& fine_state);

struct RateRow {
  double h = 0.0;  // the finer of the two error columns
  std::array<double, 6> rates{};
};

/// log2(e_k / e_{k+1}) for successive rows.  Throws std::domain_error on a
/// zero error.
std::vector<RateRow> convergence_rates(const std::vector<ErrorRow>& rows);

/// Row-per-quantity tables with one column per mesh size.
void write_errors_csv(std::ostream& os, const std::vector<ErrorRow>& rows);
void write_rates_csv(std::ostream& os, const std::vector<RateRow>& rows);
void write_infsup_csv(std::ostream& os, const std::vector<InfSupReport>& rows);

}  // namespace lce
