#pragma once

#include <array>

#include <Eigen/Core>

namespace lce {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Nondimensional material and loading parameters.  The elastic modulus and
/// the BTW prefactor are normalised to one; `b` is the Oseen-Frank constant
/// relative to them.
struct MaterialParams {
  double a = 0.6;       // anisotropy, 0 < a < 1
  double b = 0.0015;    // Oseen-Frank coefficient
  double ar_n = 1.0;    // aspect ratio of the stress-free configuration
  double M = 0.4;       // maximal extra elongation at t = 1
  double dt = 0.01;     // continuation step
  std::array<double, 2> f{0.0, 0.0};  // body force
  std::array<double, 2> g{0.0, 0.0};  // traction on the free edge Y = 1

  /// Aspect ratio of the reference (strain-free) domain.
  double ar() const;
};

/// Throws std::invalid_argument when any invariant is violated.
void validate(const MaterialParams& params);

/// BTW stored energy |F|^2 - (1-a)|F^T n|^2 - d a^{1/d'} with the 2D constant
/// 2 sqrt(a) or the 3D constant 3 a^{1/3}.  Rejects |n| != 1 (1e-12).
double btw_energy(const Mat2& F, const Vec2& n, double a);
double btw_energy(const Mat3& F, const Vec3& n, double a);

/// |F|^2 - (1-a)|F^T n|^2 without the constant (the convex part).
double btw_quadratic(const Mat2& F, const Vec2& n, double a);
double btw_quadratic(const Mat3& F, const Vec3& n, double a);

template <int D>
struct DirectorMinimum {
  double value = 0.0;
  Eigen::Matrix<double, D, 1> director;
};

/// Minimum of the BTW energy over unit directors.  The minimiser is the
/// eigenvector of F F^T for its largest eigenvalue; with a repeated eigenvalue
/// the choice is deterministic but arbitrary.  Throws std::domain_error for
/// singular F.
DirectorMinimum<2> min_over_director(const Mat2& F, double a);
DirectorMinimum<3> min_over_director(const Mat3& F, double a);

/// Sheared deformation of zero minimal energy interpolating the two stretched
/// ground states.  sign selects the +delta or -delta branch.
Mat2 shear_family_2d(double t, double a, int sign);
Mat3 shear_family_3d(double t, double a, int sign);

/// Unsheared counterpart diag(lambda, 1/lambda) (2D) used by the proposition.
Mat2 unsheared_family_2d(double t, double a);
Mat3 unsheared_family_3d(double t, double a);

struct NonconvexityWitness {
  Mat2 F_plus;
  Mat2 F_minus;
  double end_energy_plus = 0.0;
  double end_energy_minus = 0.0;
  double midpoint_energy = 0.0;
};

/// W(F) = min_n W_BTW evaluated at the +/- shears and at their midpoint.
NonconvexityWitness nonconvexity_witness(double a, double t);

/// Homogeneous pre-stretched equilibrium with vanishing Piola stress.
struct StressFreeState {
  double a = 0.6;
  double ar = 1.0;
  Vec2 n0{0.0, 1.0};
  double p0 = 0.0;
  double lambda0 = 0.0;

  Vec2 displacement(double X, double Y) const;
  Mat2 deformation_gradient() const;
};

StressFreeState stress_free_state(const MaterialParams& params);

/// Cofactor matrix d det / dF.
Mat2 cofactor(const Mat2& F);

/// First Piola-Kirchhoff stress 2 (I - (1-a) n n^T) F - p cof(F).
Mat2 piola_stress(const Mat2& F, const Vec2& n, double p, double a);

}  // namespace lce
