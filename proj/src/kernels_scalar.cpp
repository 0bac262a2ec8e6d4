#include <cmath>

#include "lcefem/kernels.hpp"

namespace lce::kernels::scalar {

void btw_density(const PointBatch& in, double a, double* out) {
  const double k = 1.0 - a;
  const double c0 = 2.0 * std::sqrt(a);
  for (std::size_t i = 0; i < in.count; ++i) {
    const double c1 = in.f11[i] * in.n1[i] + in.f21[i] * in.n2[i];
    const double c2 = in.f12[i] * in.n1[i] + in.f22[i] * in.n2[i];
    const double ff = in.f11[i] * in.f11[i] + in.f12[i] * in.f12[i] + in.f21[i] * in.f21[i] +
                      in.f22[i] * in.f22[i];
    out[i] = ff - k * (c1 * c1 + c2 * c2) - c0;
  }
}

void piola(const PointBatch& in, double a, TensorOut out) {
  const double k = 2.0 * (1.0 - a);
  for (std::size_t i = 0; i < in.count; ++i) {
    const double n1 = in.n1[i], n2 = in.n2[i], p = in.p[i];
    const double c1 = in.f11[i] * n1 + in.f21[i] * n2;
    const double c2 = in.f12[i] * n1 + in.f22[i] * n2;
    out.s11[i] = 2.0 * in.f11[i] - k * n1 * c1 - p * in.f22[i];
    out.s12[i] = 2.0 * in.f12[i] - k * n1 * c2 + p * in.f21[i];
    out.s21[i] = 2.0 * in.f21[i] - k * n2 * c1 + p * in.f12[i];
    out.s22[i] = 2.0 * in.f22[i] - k * n2 * c2 - p * in.f11[i];
  }
}

void det_minus_one(const PointBatch& in, double* out) {
  for (std::size_t i = 0; i < in.count; ++i) {
    out[i] = in.f11[i] * in.f22[i] - in.f12[i] * in.f21[i] - 1.0;
  }
}

void director_force(const PointBatch& in, double a, double* g1, double* g2) {
  const double k = -2.0 * (1.0 - a);
  for (std::size_t i = 0; i < in.count; ++i) {
    const double c1 = in.f11[i] * in.n1[i] + in.f21[i] * in.n2[i];
    const double c2 = in.f12[i] * in.n1[i] + in.f22[i] * in.n2[i];
    g1[i] = k * (in.f11[i] * c1 + in.f12[i] * c2);
    g2[i] = k * (in.f21[i] * c1 + in.f22[i] * c2);
  }
}

}  // namespace lce::kernels::scalar
