#include "lcefem/analytic_suite.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

#include <Eigen/Geometry>

namespace lce {

bool AnalyticReport::passed() const { return total_failures() == 0; }

long AnalyticReport::total_checks() const {
  long n = 0;
  for (const auto& s : suites) n += s.checks;
  return n;
}

long AnalyticReport::total_failures() const {
  long n = 0;
  for (const auto& s : suites) n += s.failures;
  return n;
}

SuiteResult AnalyticReport::summary(const std::string& name) const {
  SuiteResult out;
  out.name = name;
  for (const auto& s : suites) {
    if (s.name != name) continue;
    out.checks += s.checks;
    out.failures += s.failures;
    out.worst = std::max(out.worst, s.worst);
  }
  return out;
}

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  template <int D>
  Eigen::Matrix<double, D, D> matrix() {
    Eigen::Matrix<double, D, D> m;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) m(i, j) = normal();
    return m;
  }

  template <int D>
  Eigen::Matrix<double, D, 1> unit() {
    Eigen::Matrix<double, D, 1> v;
    do {
      for (int i = 0; i < D; ++i) v[i] = normal();
    } while (v.norm() < 1e-3);
    return v.normalized();
  }

  template <int D>
  Eigen::Matrix<double, D, D> rotation() {
    if constexpr (D == 2) {
      const double th = uniform(0.0, 2.0 * std::numbers::pi);
      Mat2 r;
      r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      return r;
    } else {
      Eigen::Quaterniond q(normal(), normal(), normal(), normal());
      return q.normalized().toRotationMatrix();
    }
  }

  /// Random matrix with determinant exactly scaled to one.
  template <int D>
  Eigen::Matrix<double, D, D> unimodular() {
    Eigen::Matrix<double, D, D> m;
    double det = 0.0;
    do {
      m = matrix<D>();
      det = m.determinant();
    } while (std::abs(det) < 1e-2);
    if (det < 0) {
      m.col(0) *= -1.0;
      det = -det;
    }
    return m / std::pow(det, 1.0 / D);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Tally {
  SuiteResult r;
  void check(bool ok, double violation) {
    ++r.checks;
    if (!ok) {
      ++r.failures;
      r.worst = std::max(r.worst, std::abs(violation));
    }
  }
};

template <int D>
double energy(const AnalyticOptions& opt, const Eigen::Matrix<double, D, D>& F,
              const Eigen::Matrix<double, D, 1>& n, double a) {
  if constexpr (D == 2) {
    return opt.energy2d(F, n, a);
  } else {
    return btw_energy(F, n, a);
  }
}

/// Squared singular values of the zero set: {sqrt a, 1/sqrt a} in 2D,
/// {a^(1/3), a^(1/3), a^(-2/3)} in 3D, ascending.
template <int D>
Eigen::Matrix<double, D, 1> zero_set_eigenvalues(double a) {
  if constexpr (D == 2) {
    return Vec2(std::sqrt(a), 1.0 / std::sqrt(a));
  } else {
    return Vec3(std::cbrt(a), std::cbrt(a), std::pow(a, -2.0 / 3.0));
  }
}

template <int D>
SuiteResult zero_set_suite(const AnalyticOptions& opt, Sampler& rng, double a) {
  using Mat = Eigen::Matrix<double, D, D>;
  using Vec = Eigen::Matrix<double, D, 1>;
  Tally t;
  t.r = {"zero-set", a, D};
  const Vec mu0 = zero_set_eigenvalues<D>(a);
  for (int s = 0; s < opt.samples; ++s) {
    // Forward: eig(F F^T) in the zero set and n its top eigenvector.
    const Mat R = rng.rotation<D>();
    const Mat Q = rng.rotation<D>();
    const Mat F = R * Vec(mu0.array().sqrt()).asDiagonal() * Q;
    const Vec n = R.col(D - 1);
    const double w = energy<D>(opt, F, n, a);
    t.check(std::abs(w) <= opt.tol, w);

    // Non-negativity for random incompressible F and unit n.
    const Mat G = rng.unimodular<D>();
    const double wg = energy<D>(opt, G, rng.unit<D>(), a);
    t.check(wg >= -opt.tol * (1.0 + G.squaredNorm()), wg);

    // Reverse: perturbed spectra away from the zero set have positive minimum.
    Vec sv = mu0.array().sqrt();
    for (int i = 0; i < D; ++i) {
      const double eps = rng.uniform(2e-3, 0.5) * (rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      sv[i] *= 1.0 + eps;
    }
    sv /= std::pow(sv.prod(), 1.0 / D);
    const Mat H = rng.rotation<D>() * sv.asDiagonal() * rng.rotation<D>();
    Vec mu = (sv.array() * sv.array()).matrix();
    std::sort(mu.data(), mu.data() + D);
    if ((mu - mu0).cwiseAbs().maxCoeff() > 1e-3) {
      const double m = min_over_director(H, a).value;
      t.check(m > 0.0, m);
    }
  }
  return t.r;
}

template <int D>
SuiteResult shear_suite(const AnalyticOptions& opt, Sampler& rng, double a) {
  Tally t;
  t.r = {"shear-family", a, D};
  for (int s = 0; s < opt.samples; ++s) {
    const double tt = (s == 0) ? 0.0 : (s == 1) ? 1.0 : rng.uniform(0.0, 1.0);
    for (int sign : {+1, -1}) {
      Eigen::Matrix<double, D, D> F;
      if constexpr (D == 2) {
        F = shear_family_2d(tt, a, sign);
      } else {
        F = shear_family_3d(tt, a, sign);
      }
      t.check(std::abs(F.determinant() - 1.0) <= 1e-12, F.determinant() - 1.0);
      const auto m = min_over_director(F, a);
      t.check(std::abs(m.value) <= opt.tol, m.value);
      const double w = energy<D>(opt, F, m.director, a);
      t.check(std::abs(w) <= opt.tol, w);
    }
    if (tt > 0.01 && tt < 0.99) {
      Eigen::Matrix<double, D, D> U;
      if constexpr (D == 2) {
        U = unsheared_family_2d(tt, a);
      } else {
        U = unsheared_family_3d(tt, a);
      }
      const double m = min_over_director(U, a).value;
      t.check(m > 0.0, m);
    }
  }
  return t.r;
}

template <int D>
SuiteResult coercivity_suite(const AnalyticOptions& opt, Sampler& rng, double a) {
  Tally t;
  t.r = {"coercivity", a, D};
  for (int s = 0; s < opt.samples; ++s) {
    const auto F = rng.matrix<D>();
    const auto n = rng.unit<D>();
    const double gap = btw_quadratic(F, n, a) - a * F.squaredNorm();
    t.check(gap >= -opt.tol, gap);
  }
  return t.r;
}

template <int D>
SuiteResult convexity_suite(const AnalyticOptions& opt, Sampler& rng, double a) {
  Tally t;
  t.r = {"convexity", a, D};
  for (int s = 0; s < opt.samples; ++s) {
    const auto F1 = rng.matrix<D>();
    const auto F2 = rng.matrix<D>();
    const auto n = rng.unit<D>();
    const double al = rng.uniform(0.0, 1.0);
    const Eigen::Matrix<double, D, D> mid = al * F1 + (1.0 - al) * F2;
    const double gap = al * btw_quadratic(F1, n, a) + (1.0 - al) * btw_quadratic(F2, n, a) -
                       btw_quadratic(mid, n, a);
    t.check(gap >= -opt.tol, gap);
  }
  return t.r;
}

template <int D>
SuiteResult nonconvexity_suite(const AnalyticOptions& opt, Sampler& rng, double a) {
  Tally t;
  t.r = {"non-convexity", a, D};
  for (int s = 0; s < opt.samples; ++s) {
    const double tt = rng.uniform(0.01, 0.99);
    double ep = 0.0, em = 0.0, mid = 0.0;
    if constexpr (D == 2) {
      const auto w = nonconvexity_witness(a, tt);
      ep = w.end_energy_plus;
      em = w.end_energy_minus;
      mid = w.midpoint_energy;
    } else {
      const Mat3 Fp = shear_family_3d(tt, a, +1);
      const Mat3 Fm = shear_family_3d(tt, a, -1);
      ep = min_over_director(Fp, a).value;
      em = min_over_director(Fm, a).value;
      mid = min_over_director(Mat3(0.5 * (Fp + Fm)), a).value;
    }
    t.check(std::abs(ep) <= opt.tol && std::abs(em) <= opt.tol, std::max(std::abs(ep), std::abs(em)));
    t.check(mid > 1e-8, mid);
  }
  return t.r;
}

template <int D>
SuiteResult frame_suite(const AnalyticOptions& opt, Sampler& rng, double a) {
  Tally t;
  t.r = {"frame-indifference", a, D};
  for (int s = 0; s < opt.samples; ++s) {
    const auto F = rng.matrix<D>();
    const auto n = rng.unit<D>();
    const auto R = rng.rotation<D>();
    const auto Q = rng.rotation<D>();
    const double w = energy<D>(opt, F, n, a);
    const Eigen::Matrix<double, D, 1> rn = (R * n).normalized();
    const double w1 = energy<D>(opt, R * F, rn, a);
    const double w2 = energy<D>(opt, F * Q, n, a);
    const double scale = 1.0 + std::abs(w);
    t.check(std::abs(w1 - w) <= 1e-12 * scale, w1 - w);
    t.check(std::abs(w2 - w) <= 1e-12 * scale, w2 - w);
  }
  return t.r;
}

SuiteResult stress_free_suite(double a) {
  Tally t;
  t.r = {"stress-free", a, 2};
  MaterialParams p;
  p.a = a;
  const StressFreeState s = stress_free_state(p);
  const Mat2 sigma = piola_stress(s.deformation_gradient(), s.n0, s.p0, a);
  t.check(sigma.cwiseAbs().maxCoeff() <= 1e-12, sigma.cwiseAbs().maxCoeff());
  t.check(std::abs(s.deformation_gradient().determinant() - 1.0) <= 1e-12,
          s.deformation_gradient().determinant() - 1.0);
  return t.r;
}

}  // namespace

AnalyticReport run_analytic_suites(const AnalyticOptions& opt) {
  AnalyticReport report;
  Sampler rng(opt.seed);
  for (double a : opt.a_values) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("analytic suite: a must lie in (0, 1)");
    report.suites.push_back(zero_set_suite<2>(opt, rng, a));
    report.suites.push_back(zero_set_suite<3>(opt, rng, a));
    report.suites.push_back(shear_suite<2>(opt, rng, a));
    report.suites.push_back(shear_suite<3>(opt, rng, a));
    report.suites.push_back(coercivity_suite<2>(opt, rng, a));
    report.suites.push_back(coercivity_suite<3>(opt, rng, a));
    report.suites.push_back(convexity_suite<2>(opt, rng, a));
    report.suites.push_back(convexity_suite<3>(opt, rng, a));
    report.suites.push_back(nonconvexity_suite<2>(opt, rng, a));
    report.suites.push_back(nonconvexity_suite<3>(opt, rng, a));
    report.suites.push_back(frame_suite<2>(opt, rng, a));
    report.suites.push_back(frame_suite<3>(opt, rng, a));
    report.suites.push_back(stress_free_suite(a));
  }
  return report;
}

void print_report(std::ostream& os, const AnalyticReport& report) {
  for (const auto& s : report.suites) {
    os << std::left << std::setw(20) << s.name << " a=" << std::setw(4) << s.a << " " << s.dim
       << "D  checks=" << std::setw(7) << s.checks << " failures=" << s.failures;
    if (s.failures > 0) os << " worst=" << s.worst;
    os << (s.failures == 0 ? "  ok" : "  FAIL") << '\n';
  }
  os << "total checks=" << report.total_checks() << " failures=" << report.total_failures()
     << '\n';
}

}  // namespace lce
