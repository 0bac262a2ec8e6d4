#include "lcefem/btw.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace lce {

double MaterialParams::ar() const { return ar_n / std::sqrt(a); }

void validate(const MaterialParams& p) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("material parameters: " + what);
  };
  if (!(p.a > 0.0 && p.a < 1.0)) fail("a must lie in (0, 1)");
  if (!(p.b > 0.0)) fail("b must be positive");
  if (!(p.ar_n > 0.0)) fail("ar_n must be positive");
  if (!(p.M >= 0.0)) fail("M must be non-negative");
  if (!(p.dt > 0.0 && p.dt <= 1.0)) fail("dt must lie in (0, 1]");
  for (double v : {p.f[0], p.f[1], p.g[0], p.g[1]}) {
    if (!std::isfinite(v)) fail("loads must be finite");
  }
}

namespace {

template <class V>
void require_unit(const V& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("btw_energy: director must have unit length");
  }
}

}  // namespace

double btw_quadratic(const Mat2& F, const Vec2& n, double a) {
  return F.squaredNorm() - (1.0 - a) * (F.transpose() * n).squaredNorm();
}

double btw_quadratic(const Mat3& F, const Vec3& n, double a) {
  return F.squaredNorm() - (1.0 - a) * (F.transpose() * n).squaredNorm();
}

double btw_energy(const Mat2& F, const Vec2& n, double a) {
  require_unit(n);
  return btw_quadratic(F, n, a) - 2.0 * std::sqrt(a);
}

double btw_energy(const Mat3& F, const Vec3& n, double a) {
  require_unit(n);
  return btw_quadratic(F, n, a) - 3.0 * std::cbrt(a);
}

namespace {

template <int D>
DirectorMinimum<D> min_over_director_impl(const Eigen::Matrix<double, D, D>& F, double a,
                                          double constant) {
  const double scale = std::pow(F.norm(), D);
  if (!(std::abs(F.determinant()) > 1e-14 * scale)) {
    throw std::domain_error("min_over_director: singular deformation gradient");
  }
  const Eigen::Matrix<double, D, D> C = F * F.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, D, D>> es(C);
  const auto& mu = es.eigenvalues();  // ascending
  DirectorMinimum<D> out;
  out.value = mu.sum() - (1.0 - a) * mu[D - 1] - constant;
  out.director = es.eigenvectors().col(D - 1);
  return out;
}

}  // namespace

DirectorMinimum<2> min_over_director(const Mat2& F, double a) {
  return min_over_director_impl<2>(F, a, 2.0 * std::sqrt(a));
}

DirectorMinimum<3> min_over_director(const Mat3& F, double a) {
  return min_over_director_impl<3>(F, a, 3.0 * std::cbrt(a));
}

namespace {

double guarded_sqrt(double arg) {
  if (arg < -1e-12) {
    throw std::domain_error("shear_family: negative shear amplitude squared");
  }
  return arg > 0.0 ? std::sqrt(arg) : 0.0;
}

void check_family_args(double t, double a, int sign) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("shear_family: t must lie in [0, 1]");
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("shear_family: a must lie in (0, 1)");
  if (sign != 1 && sign != -1) throw std::invalid_argument("shear_family: sign must be +1 or -1");
}

}  // namespace

Mat2 unsheared_family_2d(double t, double a) {
  const double lam = std::pow(a, 0.25) * (1.0 - t) + std::pow(a, -0.25) * t;
  Mat2 F;
  F << lam, 0.0, 0.0, 1.0 / lam;
  return F;
}

Mat2 shear_family_2d(double t, double a, int sign) {
  check_family_args(t, a, sign);
  Mat2 F = unsheared_family_2d(t, a);
  const double lam = F(0, 0);
  const double delta =
      guarded_sqrt(std::sqrt(a) + 1.0 / std::sqrt(a) - (lam * lam + 1.0 / (lam * lam)));
  F(0, 1) = sign * delta;
  return F;
}

Mat3 unsheared_family_3d(double t, double a) {
  const double lam = std::pow(a, 1.0 / 6.0) * (1.0 - t) + std::pow(a, -1.0 / 3.0) * t;
  Mat3 F = Mat3::Zero();
  F(0, 0) = std::pow(a, 1.0 / 6.0);
  F(1, 1) = lam;
  F(2, 2) = std::pow(a, -1.0 / 6.0) / lam;
  return F;
}

Mat3 shear_family_3d(double t, double a, int sign) {
  check_family_args(t, a, sign);
  Mat3 F = unsheared_family_3d(t, a);
  const double lam = F(1, 1);
  const double delta = guarded_sqrt(std::cbrt(a) + std::pow(a, -2.0 / 3.0) -
                                    (lam * lam + std::pow(a, -1.0 / 3.0) / (lam * lam)));
  F(1, 2) = sign * delta;
  return F;
}

NonconvexityWitness nonconvexity_witness(double a, double t) {
  NonconvexityWitness w;
  w.F_plus = shear_family_2d(t, a, +1);
  w.F_minus = shear_family_2d(t, a, -1);
  w.end_energy_plus = min_over_director(w.F_plus, a).value;
  w.end_energy_minus = min_over_director(w.F_minus, a).value;
  w.midpoint_energy = min_over_director(Mat2(0.5 * (w.F_plus + w.F_minus)), a).value;
  return w;
}

Vec2 StressFreeState::displacement(double X, double Y) const {
  return {(std::pow(a, 0.25) - 1.0) * (X - 0.5 * ar), (std::pow(a, -0.25) - 1.0) * (Y - 0.5)};
}

Mat2 StressFreeState::deformation_gradient() const {
  Mat2 F;
  F << std::pow(a, 0.25), 0.0, 0.0, std::pow(a, -0.25);
  return F;
}

StressFreeState stress_free_state(const MaterialParams& params) {
  validate(params);
  StressFreeState s;
  s.a = params.a;
  s.ar = params.ar();
  s.p0 = 2.0 * std::sqrt(params.a);
  s.lambda0 = (1.0 - params.a) / std::sqrt(params.a);
  return s;
}

Mat2 cofactor(const Mat2& F) {
  Mat2 c;
  c << F(1, 1), -F(1, 0), -F(0, 1), F(0, 0);
  return c;
}

Mat2 piola_stress(const Mat2& F, const Vec2& n, double p, double a) {
  const Mat2 A = Mat2::Identity() - (1.0 - a) * n * n.transpose();
  return 2.0 * A * F - p * cofactor(F);
}

}  // namespace lce
