#include <cstdlib>
#include <stdexcept>
#include <string>

#include "syncctl/simd/kernels.h"

namespace syncctl::simd {
namespace {

bool CpuHasAvx2() {
#if defined(SYNCCTL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool IsSupported(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2: return CpuHasAvx2();
    case Isa::kNeon:
#if defined(SYNCCTL_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& SelectKernels() {
  if (const char* env = std::getenv("SYNCCTL_SIMD")) {
    const std::string want(env);
    for (Isa isa : SupportedIsas()) {
      if (want == IsaName(isa)) return KernelsFor(isa);
    }
    // Unknown or unsupported request falls through to the best available.
  }
  return KernelsFor(SupportedIsas().back());
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

std::vector<Isa> SupportedIsas() {
  std::vector<Isa> out{Isa::kScalar};
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (IsSupported(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& KernelsFor(Isa isa) {
  if (!IsSupported(isa)) {
    throw std::invalid_argument("kernel set not supported on this CPU: " +
                                std::string(IsaName(isa)));
  }
  switch (isa) {
#if defined(SYNCCTL_HAVE_AVX2)
    case Isa::kAvx2: return Avx2Kernels();
#endif
#if defined(SYNCCTL_HAVE_NEON)
    case Isa::kNeon: return NeonKernels();
#endif
    default: return ScalarKernels();
  }
}

const KernelTable& Active() {
  static const KernelTable& table = SelectKernels();
  return table;
}

}  // namespace syncctl::simd
