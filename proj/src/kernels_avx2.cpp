#include <immintrin.h>

#include <cmath>

#include "lcefem/kernels.hpp"

namespace lce::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

PointBatch tail(const PointBatch& in, std::size_t start) {
  PointBatch t = in;
  auto shift = [start](const double* p) { return p ? p + start : nullptr; };
  t.f11 = shift(in.f11);
  t.f12 = shift(in.f12);
  t.f21 = shift(in.f21);
  t.f22 = shift(in.f22);
  t.n1 = shift(in.n1);
  t.n2 = shift(in.n2);
  t.p = shift(in.p);
  t.count = in.count - start;
  return t;
}

struct Lanes {
  __m256d f11, f12, f21, f22, n1, n2;
};

inline Lanes load(const PointBatch& in, std::size_t i) {
  return {_mm256_loadu_pd(in.f11 + i), _mm256_loadu_pd(in.f12 + i),
          _mm256_loadu_pd(in.f21 + i), _mm256_loadu_pd(in.f22 + i),
          _mm256_loadu_pd(in.n1 + i),  _mm256_loadu_pd(in.n2 + i)};
}

// F^T n
inline void ftn(const Lanes& v, __m256d& c1, __m256d& c2) {
  c1 = _mm256_fmadd_pd(v.f21, v.n2, _mm256_mul_pd(v.f11, v.n1));
  c2 = _mm256_fmadd_pd(v.f22, v.n2, _mm256_mul_pd(v.f12, v.n1));
}

}  // namespace

void btw_density(const PointBatch& in, double a, double* out) {
  const __m256d k = _mm256_set1_pd(1.0 - a);
  const __m256d c0 = _mm256_set1_pd(2.0 * std::sqrt(a));
  std::size_t i = 0;
  for (; i + kLanes <= in.count; i += kLanes) {
    const Lanes v = load(in, i);
    __m256d c1, c2;
    ftn(v, c1, c2);
    __m256d ff = _mm256_mul_pd(v.f11, v.f11);
    ff = _mm256_fmadd_pd(v.f12, v.f12, ff);
    ff = _mm256_fmadd_pd(v.f21, v.f21, ff);
    ff = _mm256_fmadd_pd(v.f22, v.f22, ff);
    const __m256d cc = _mm256_fmadd_pd(c2, c2, _mm256_mul_pd(c1, c1));
    const __m256d w = _mm256_sub_pd(_mm256_fnmadd_pd(k, cc, ff), c0);
    _mm256_storeu_pd(out + i, w);
  }
  if (i < in.count) scalar::btw_density(tail(in, i), a, out + i);
}

void piola(const PointBatch& in, double a, TensorOut out) {
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d k = _mm256_set1_pd(2.0 * (1.0 - a));
  std::size_t i = 0;
  for (; i + kLanes <= in.count; i += kLanes) {
    const Lanes v = load(in, i);
    const __m256d p = _mm256_loadu_pd(in.p + i);
    __m256d c1, c2;
    ftn(v, c1, c2);
    const __m256d kn1 = _mm256_mul_pd(k, v.n1);
    const __m256d kn2 = _mm256_mul_pd(k, v.n2);
    // 2 F - k n c^T -/+ p cof(F)
    __m256d s11 = _mm256_fnmadd_pd(kn1, c1, _mm256_mul_pd(two, v.f11));
    __m256d s12 = _mm256_fnmadd_pd(kn1, c2, _mm256_mul_pd(two, v.f12));
    __m256d s21 = _mm256_fnmadd_pd(kn2, c1, _mm256_mul_pd(two, v.f21));
    __m256d s22 = _mm256_fnmadd_pd(kn2, c2, _mm256_mul_pd(two, v.f22));
    s11 = _mm256_fnmadd_pd(p, v.f22, s11);
    s12 = _mm256_fmadd_pd(p, v.f21, s12);
    s21 = _mm256_fmadd_pd(p, v.f12, s21);
    s22 = _mm256_fnmadd_pd(p, v.f11, s22);
    _mm256_storeu_pd(out.s11 + i, s11);
    _mm256_storeu_pd(out.s12 + i, s12);
    _mm256_storeu_pd(out.s21 + i, s21);
    _mm256_storeu_pd(out.s22 + i, s22);
  }
  if (i < in.count) {
    scalar::piola(tail(in, i), a, {out.s11 + i, out.s12 + i, out.s21 + i, out.s22 + i});
  }
}

void det_minus_one(const PointBatch& in, double* out) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= in.count; i += kLanes) {
    const __m256d f11 = _mm256_loadu_pd(in.f11 + i);
    const __m256d f12 = _mm256_loadu_pd(in.f12 + i);
    const __m256d f21 = _mm256_loadu_pd(in.f21 + i);
    const __m256d f22 = _mm256_loadu_pd(in.f22 + i);
    const __m256d d = _mm256_fmsub_pd(f11, f22, _mm256_mul_pd(f12, f21));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(d, one));
  }
  if (i < in.count) scalar::det_minus_one(tail(in, i), out + i);
}

void director_force(const PointBatch& in, double a, double* g1, double* g2) {
  const __m256d k = _mm256_set1_pd(-2.0 * (1.0 - a));
  std::size_t i = 0;
  for (; i + kLanes <= in.count; i += kLanes) {
    const Lanes v = load(in, i);
    __m256d c1, c2;
    ftn(v, c1, c2);
    const __m256d fc1 = _mm256_fmadd_pd(v.f12, c2, _mm256_mul_pd(v.f11, c1));
    const __m256d fc2 = _mm256_fmadd_pd(v.f22, c2, _mm256_mul_pd(v.f21, c1));
    _mm256_storeu_pd(g1 + i, _mm256_mul_pd(k, fc1));
    _mm256_storeu_pd(g2 + i, _mm256_mul_pd(k, fc2));
  }
  if (i < in.count) scalar::director_force(tail(in, i), a, g1 + i, g2 + i);
}

}  // namespace lce::kernels::avx2
