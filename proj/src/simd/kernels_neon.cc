#include <arm_neon.h>

#include "syncctl/simd/kernels.h"

namespace syncctl::simd {
namespace {

double DotNeon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double SumSquaresNeon(const double* x, std::size_t n) {
  return DotNeon(x, x, n);
}

void AxpyNeon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void XpbyNeon(const double* x, double b, double* y, std::size_t n) {
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(x + i), vb, vld1q_f64(y + i)));
  }
  for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

void ScaleNeon(double a, double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), a));
  }
  for (; i < n; ++i) x[i] *= a;
}

void MultiplyNeon(const double* x, const double* y, double* out,
                  std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

}  // namespace

const KernelTable& NeonKernels() {
  static const KernelTable table{Isa::kNeon, DotNeon,  SumSquaresNeon,
                                 AxpyNeon,   XpbyNeon, ScaleNeon,
                                 MultiplyNeon};
  return table;
}

}  // namespace syncctl::simd
