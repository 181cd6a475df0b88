#ifndef SYNCCTL_SIMD_KERNELS_H_
#define SYNCCTL_SIMD_KERNELS_H_

// Dense vector kernels used by the solvers' inner loops (inner products,
// CG updates, quadrature of control norms, masking). Each kernel has a scalar
// reference implementation and, where the target supports it, an AVX2 or NEON
// variant. The variant is chosen once at runtime; SYNCCTL_SIMD=scalar|avx2|neon
// overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace syncctl::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] = x[i] + b * y[i]
  void (*xpby)(const double* x, double b, double* y, std::size_t n);
  // x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  // out[i] = x[i] * y[i]
  void (*multiply)(const double* x, const double* y, double* out,
                   std::size_t n);
};

const KernelTable& ScalarKernels();
#if defined(SYNCCTL_HAVE_AVX2)
const KernelTable& Avx2Kernels();
#endif
#if defined(SYNCCTL_HAVE_NEON)
const KernelTable& NeonKernels();
#endif

// Kernel sets that the current CPU can execute, scalar first.
std::vector<Isa> SupportedIsas();
// Throws std::invalid_argument when `isa` is not executable here.
const KernelTable& KernelsFor(Isa isa);
// The process-wide selection.
const KernelTable& Active();

inline double Dot(std::span<const double> x, std::span<const double> y) {
  return Active().dot(x.data(), y.data(), x.size());
}
inline double SumSquares(std::span<const double> x) {
  return Active().sum_squares(x.data(), x.size());
}
inline void Axpy(double a, std::span<const double> x, std::span<double> y) {
  Active().axpy(a, x.data(), y.data(), x.size());
}
inline void Xpby(std::span<const double> x, double b, std::span<double> y) {
  Active().xpby(x.data(), b, y.data(), x.size());
}
inline void Scale(double a, std::span<double> x) {
  Active().scale(a, x.data(), x.size());
}
inline void Multiply(std::span<const double> x, std::span<const double> y,
                     std::span<double> out) {
  Active().multiply(x.data(), y.data(), out.data(), x.size());
}

}  // namespace syncctl::simd

#endif  // SYNCCTL_SIMD_KERNELS_H_
