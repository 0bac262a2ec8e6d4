#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "doctest.h"
#include "lcefem/analytic_suite.hpp"
#include "lcefem/btw.hpp"

using namespace lce;

namespace {

Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Brute-force minimum over a fine director sweep.
double sweep_min(const Mat2& F, double a) {
  double m = INFINITY;
  for (int k = 0; k < 20000; ++k) {
    m = std::min(m, btw_energy(F, unit(M_PI * k / 20000.0), a));
  }
  return m;
}

}  // namespace

TEST_CASE("energy at the ground states") {
  const double a = 0.6;
  Mat2 F = Mat2::Zero();
  F(0, 0) = std::pow(a, 0.25);
  F(1, 1) = std::pow(a, -0.25);
  CHECK(std::abs(btw_energy(F, Vec2(0, 1), a)) < 1e-12);
  CHECK(btw_energy(Mat2::Identity(), Vec2(0, 1), a) == doctest::Approx(0.050807).epsilon(1e-5));
  CHECK(btw_energy(Mat2::Identity(), Vec2(0, 1), a) ==
        doctest::Approx(std::pow(1 - std::sqrt(a), 2)).epsilon(1e-14));
  Mat3 G = Mat3::Zero();
  G(0, 0) = G(1, 1) = std::pow(a, 1.0 / 6.0);
  G(2, 2) = std::pow(a, -1.0 / 3.0);
  CHECK(std::abs(btw_energy(G, Vec3(0, 0, 1), a)) < 1e-12);
  CHECK_THROWS_AS(btw_energy(F, Vec2(0, 1.1), a), std::invalid_argument);
}

TEST_CASE("minimum over directors") {
  const double a = 0.6;
  Mat2 F = Mat2::Zero();
  F(0, 0) = std::pow(a, 0.25);
  F(1, 1) = std::pow(a, -0.25);
  const auto m = min_over_director(F, a);
  CHECK(std::abs(m.value) < 1e-12);
  CHECK(std::abs(std::abs(m.director[1]) - 1.0) < 1e-12);
  CHECK(min_over_director(Mat2(Mat2::Identity()), a).value ==
        doctest::Approx(1 + a - 2 * std::sqrt(a)).epsilon(1e-14));

  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> th(0, 2 * M_PI);
  for (int trial = 0; trial < 20; ++trial) {
    Mat2 R;
    R << 1 + 0.3 * g(rng), 0.3 * g(rng), 0.3 * g(rng), 1 + 0.3 * g(rng);
    if (std::abs(R.determinant()) < 0.1) continue;
    const auto mm = min_over_director(R, a);
    for (int k = 0; k < 1000; ++k) CHECK(btw_energy(R, unit(th(rng)), a) - mm.value >= -1e-12);
  }
  CHECK_THROWS_AS(min_over_director(Mat2(Mat2::Zero()), a), std::domain_error);
}

TEST_CASE("shear family") {
  const double a = 0.6;
  const Mat2 F0 = shear_family_2d(0.0, a, 1);
  CHECK(F0(0, 0) == doctest::Approx(std::pow(a, 0.25)));
  CHECK(F0(1, 1) == doctest::Approx(std::pow(a, -0.25)));
  CHECK(std::abs(F0(0, 1)) + std::abs(F0(1, 0)) < 1e-14);

  const double lam = 0.5 * (std::pow(a, 0.25) + std::pow(a, -0.25));
  const double delta =
      std::sqrt(std::sqrt(a) + 1 / std::sqrt(a) - lam * lam - 1 / (lam * lam));
  for (int sign : {1, -1}) {
    const Mat2 F = shear_family_2d(0.5, a, sign);
    CHECK(F.determinant() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(F(0, 1)) + std::abs(F(1, 0)) == doctest::Approx(delta).epsilon(1e-12));
    CHECK(std::abs(min_over_director(F, a).value) < 1e-10);
    CHECK(std::abs(sweep_min(F, a)) < 1e-6);
  }
  CHECK(min_over_director(unsheared_family_2d(0.5, a), a).value > 1e-6);

  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    const Mat3 G = shear_family_3d(t, a, 1);
    CHECK(G.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(min_over_director(G, a).value) < 1e-10);
  }
}

TEST_CASE("non-convexity witness") {
  for (auto [a, t] : {std::pair{0.6, 0.5}, std::pair{0.9, 0.3}}) {
    const auto w = nonconvexity_witness(a, t);
    CHECK(std::abs(w.end_energy_plus) <= 1e-10);
    CHECK(std::abs(w.end_energy_minus) <= 1e-10);
    CHECK(w.midpoint_energy > 1e-8);
  }
  // the witness degenerates continuously as t -> 0
  double prev = INFINITY;
  for (double t : {0.2, 0.05, 0.01, 1e-3}) {
    const double m = nonconvexity_witness(0.6, t).midpoint_energy;
    CHECK(m < prev);
    prev = m;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("stress-free state and Piola stress") {
  MaterialParams p;
  const StressFreeState s = stress_free_state(p);
  CHECK(s.p0 == doctest::Approx(1.549193).epsilon(1e-6));
  CHECK(s.lambda0 == doctest::Approx(0.516398).epsilon(1e-6));
  const Vec2 c = s.displacement(0.5 * s.ar, 0.5);
  CHECK(std::abs(c[0]) + std::abs(c[1]) < 1e-15);
  CHECK(piola_stress(s.deformation_gradient(), s.n0, s.p0, p.a).norm() < 1e-12);

  const double a = 0.6, q = 0.37;
  const Mat2 P = piola_stress(Mat2::Identity(), Vec2(0, 1), q, a);
  CHECK(P(0, 0) == doctest::Approx(2 - q));
  CHECK(P(1, 1) == doctest::Approx(2 * a - q));
  CHECK(std::abs(P(0, 1)) + std::abs(P(1, 0)) < 1e-15);
  const Mat2 Q = piola_stress(Mat2::Identity(), Vec2(1, 0), 0.0, a);
  CHECK(Q(0, 0) == doctest::Approx(2 * a));
  CHECK(Q(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("material parameter validation") {
  MaterialParams p;
  p.a = 1.5;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = MaterialParams{};
  p.b = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = MaterialParams{};
  p.dt = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  CHECK_NOTHROW(validate(MaterialParams{}));
}

TEST_CASE("analytic suites pass for the default sweep") {
  AnalyticOptions o;
  o.samples = 2000;
  const AnalyticReport r = run_analytic_suites(o);
  CHECK(r.passed());
  CHECK(r.total_failures() == 0);
  for (const char* name : {"zero-set", "shear-family", "coercivity", "convexity", "non-convexity",
                           "stress-free"}) {
    const SuiteResult s = r.summary(name);
    CHECK_MESSAGE(s.checks > 0, name);
    CHECK_MESSAGE(s.failures == 0, name);
  }
  std::ostringstream os;
  print_report(os, r);
  CHECK(os.str().find("FAIL") == std::string::npos);
}

TEST_CASE("a wrong 2D constant is caught by the zero-set suite") {
  AnalyticOptions o;
  o.samples = 500;
  o.energy2d = [](const Mat2& F, const Vec2& n, double a) {
    return btw_quadratic(F, n, a) - 3.0 * std::cbrt(a);
  };
  const AnalyticReport r = run_analytic_suites(o);
  CHECK_FALSE(r.passed());
  CHECK(r.summary("zero-set").failures > 0);
}
