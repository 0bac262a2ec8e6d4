#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcefem/btw.hpp"

namespace lce {

/// Randomised property checks of the closed-form BTW results: zero set,
/// shear family, coercivity, convexity, non-convexity of the relaxed energy,
/// frame indifference and the stress-free state.
struct AnalyticOptions {
  std::vector<double> a_values{0.1, 0.3, 0.6, 0.9};
  int samples = 10000;
  std::uint64_t seed = 20240917;
  double tol = 1e-10;
  /// 2D energy under test.  Replaceable so mutation checks can show that the
  /// suites detect a wrong constant.
  std::function<double(const Mat2&, const Vec2&, double)> energy2d =
      [](const Mat2& F, const Vec2& n, double a) { return btw_energy(F, n, a); };
};

struct SuiteResult {
  std::string name;
  double a = 0.0;
  int dim = 2;
  long checks = 0;
  long failures = 0;
  double worst = 0.0;  // largest violation observed (0 when none)
};

struct AnalyticReport {
  std::vector<SuiteResult> suites;

  bool passed() const;
  long total_checks() const;
  long total_failures() const;
  /// Aggregated result of one named suite over all a and dimensions.
  SuiteResult summary(const std::string& name) const;
};

AnalyticReport run_analytic_suites(const AnalyticOptions& options = {});

void print_report(std::ostream& os, const AnalyticReport& report);

}  // namespace lce
