#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace lce::kernels {

// Pointwise constitutive kernels evaluated over batches of quadrature
// points in structure-of-arrays layout.  Each kernel has a scalar reference
// implementation and a vectorised variant; the variant is chosen once at
// runtime from the CPU features and can be overridden for testing.

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);
bool backend_supported(Backend b);
Backend best_backend();
Backend active_backend();
/// Throws std::invalid_argument for a backend the CPU cannot run.
void set_backend(Backend b);

struct PointBatch {
  const double* f11 = nullptr;
  const double* f12 = nullptr;
  const double* f21 = nullptr;
  const double* f22 = nullptr;
  const double* n1 = nullptr;
  const double* n2 = nullptr;
  const double* p = nullptr;
  std::size_t count = 0;
};

struct TensorOut {
  double* s11 = nullptr;
  double* s12 = nullptr;
  double* s21 = nullptr;
  double* s22 = nullptr;
};

/// Owning SoA buffer for F, n, p at a set of points.
struct PointData {
  std::vector<double> f11, f12, f21, f22, n1, n2, p;

  void resize(std::size_t n);
  std::size_t size() const { return f11.size(); }
  PointBatch batch() const;
};

/// |F|^2 - (1-a)|F^T n|^2 - 2 sqrt(a)  (n is used as given, not normalised)
void btw_density(const PointBatch& in, double a, double* out);

/// 2 (F - (1-a) n (F^T n)^T) - p cof(F)
void piola(const PointBatch& in, double a, TensorOut out);

/// det F - 1
void det_minus_one(const PointBatch& in, double* out);

/// -2 (1-a) F F^T n, the pointwise director force paired with a test m.
void director_force(const PointBatch& in, double a, double* g1, double* g2);

namespace scalar {
void btw_density(const PointBatch& in, double a, double* out);
void piola(const PointBatch& in, double a, TensorOut out);
void det_minus_one(const PointBatch& in, double* out);
void director_force(const PointBatch& in, double a, double* g1, double* g2);
}  // namespace scalar

#if defined(LCEFEM_HAVE_AVX2)
namespace avx2 {
void btw_density(const PointBatch& in, double a, double* out);
void piola(const PointBatch& in, double a, TensorOut out);
void det_minus_one(const PointBatch& in, double* out);
void director_force(const PointBatch& in, double a, double* g1, double* g2);
}  // namespace avx2
#endif

}  // namespace lce::kernels
