#include <cmath>
#include <random>
#include <vector>

#include <Eigen/LU>

#include "doctest.h"
#include "lcefem/btw.hpp"
#include "lcefem/kernels.hpp"

using namespace lce;
namespace k = lce::kernels;

namespace {

k::PointData random_points(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> th(0, 2 * M_PI);
  k::PointData d;
  d.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.f11[i] = 1 + 0.4 * g(rng);
    d.f12[i] = 0.4 * g(rng);
    d.f21[i] = 0.4 * g(rng);
    d.f22[i] = 1 + 0.4 * g(rng);
    const double t = th(rng);
    d.n1[i] = std::cos(t);
    d.n2[i] = std::sin(t);
    d.p[i] = 2 * g(rng);
  }
  return d;
}

void check_close(const std::vector<double>& x, const std::vector<double>& y) {
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(x[i] - y[i]) <= 1e-13 * (1 + std::abs(y[i])));
  }
}

}  // namespace

TEST_CASE("scalar kernels match the closed-form reference") {
  const double a = 0.6;
  const auto d = random_points(37, 1);
  std::vector<double> w(d.size()), det(d.size()), g1(d.size()), g2(d.size());
  std::vector<double> s11(d.size()), s12(d.size()), s21(d.size()), s22(d.size());
  k::scalar::btw_density(d.batch(), a, w.data());
  k::scalar::det_minus_one(d.batch(), det.data());
  k::scalar::director_force(d.batch(), a, g1.data(), g2.data());
  k::scalar::piola(d.batch(), a, {s11.data(), s12.data(), s21.data(), s22.data()});
  for (std::size_t i = 0; i < d.size(); ++i) {
    Mat2 F;
    F << d.f11[i], d.f12[i], d.f21[i], d.f22[i];
    const Vec2 n(d.n1[i], d.n2[i]);
    CHECK(w[i] == doctest::Approx(btw_energy(F, n, a)).epsilon(1e-13));
    CHECK(det[i] == doctest::Approx(F.determinant() - 1).epsilon(1e-13));
    const Vec2 f = -2 * (1 - a) * F * F.transpose() * n;
    CHECK(g1[i] == doctest::Approx(f[0]).epsilon(1e-13));
    CHECK(g2[i] == doctest::Approx(f[1]).epsilon(1e-13));
    const Mat2 P = piola_stress(F, n, d.p[i], a);
    CHECK(s11[i] == doctest::Approx(P(0, 0)).epsilon(1e-13));
    CHECK(s12[i] == doctest::Approx(P(0, 1)).epsilon(1e-13));
    CHECK(s21[i] == doctest::Approx(P(1, 0)).epsilon(1e-13));
    CHECK(s22[i] == doctest::Approx(P(1, 1)).epsilon(1e-13));
  }
}

TEST_CASE("backend selection") {
  CHECK(k::backend_supported(k::Backend::Scalar));
  CHECK(k::backend_supported(k::best_backend()));
  const k::Backend before = k::active_backend();
  k::set_backend(k::Backend::Scalar);
  CHECK(k::active_backend() == k::Backend::Scalar);
  CHECK(k::backend_name(k::Backend::Scalar) == "scalar");
  if (!k::backend_supported(k::Backend::Avx2)) {
    CHECK_THROWS_AS(k::set_backend(k::Backend::Avx2), std::invalid_argument);
  }
  k::set_backend(before);
}

#if defined(LCEFEM_HAVE_AVX2)
TEST_CASE("AVX2 kernels agree with the scalar reference, including tails") {
  if (!k::backend_supported(k::Backend::Avx2)) {
    MESSAGE("AVX2 not supported on this CPU; equivalence not exercised");
    return;
  }
  const double a = 0.3;
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 1001u}) {
    const auto d = random_points(n, 100 + static_cast<unsigned>(n));
    std::vector<double> r0(n), r1(n), x0(n), x1(n), y0(n), y1(n);
    k::scalar::btw_density(d.batch(), a, r0.data());
    k::avx2::btw_density(d.batch(), a, r1.data());
    check_close(r1, r0);
    k::scalar::det_minus_one(d.batch(), r0.data());
    k::avx2::det_minus_one(d.batch(), r1.data());
    check_close(r1, r0);
    k::scalar::director_force(d.batch(), a, x0.data(), y0.data());
    k::avx2::director_force(d.batch(), a, x1.data(), y1.data());
    check_close(x1, x0);
    check_close(y1, y0);
    std::vector<double> s[8];
    for (auto& v : s) v.assign(n, 0.0);
    k::scalar::piola(d.batch(), a, {s[0].data(), s[1].data(), s[2].data(), s[3].data()});
    k::avx2::piola(d.batch(), a, {s[4].data(), s[5].data(), s[6].data(), s[7].data()});
    for (int c = 0; c < 4; ++c) check_close(s[c + 4], s[c]);
  }
}

TEST_CASE("dispatch routes to the selected backend") {
  if (!k::backend_supported(k::Backend::Avx2)) return;
  const auto d = random_points(29, 9);
  std::vector<double> x(d.size()), y(d.size());
  const k::Backend before = k::active_backend();
  k::set_backend(k::Backend::Scalar);
  k::btw_density(d.batch(), 0.6, x.data());
  k::set_backend(k::Backend::Avx2);
  k::btw_density(d.batch(), 0.6, y.data());
  check_close(y, x);
  k::set_backend(before);
}
#endif
