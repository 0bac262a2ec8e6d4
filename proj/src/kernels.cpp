#include "lcefem/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace lce::kernels {

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(LCEFEM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Backend best_backend() {
  return backend_supported(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

namespace {

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{best_backend()};
  return b;
}

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument("kernels: backend not supported on this CPU");
  }
  current().store(b, std::memory_order_relaxed);
}

void PointData::resize(std::size_t n) {
  for (auto* v : {&f11, &f12, &f21, &f22, &n1, &n2, &p}) v->assign(n, 0.0);
}

PointBatch PointData::batch() const {
  return {f11.data(), f12.data(), f21.data(), f22.data(), n1.data(), n2.data(), p.data(),
          f11.size()};
}

#if defined(LCEFEM_HAVE_AVX2)
#define LCE_DISPATCH(fn, ...)                                              \
  (active_backend() == Backend::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define LCE_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void btw_density(const PointBatch& in, double a, double* out) {
  LCE_DISPATCH(btw_density, in, a, out);
}

void piola(const PointBatch& in, double a, TensorOut out) { LCE_DISPATCH(piola, in, a, out); }

void det_minus_one(const PointBatch& in, double* out) { LCE_DISPATCH(det_minus_one, in, out); }

void director_force(const PointBatch& in, double a, double* g1, double* g2) {
  LCE_DISPATCH(director_force, in, a, g1, g2);
}

#undef LCE_DISPATCH

}  // namespace lce::kernels
