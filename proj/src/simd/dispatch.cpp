#include <cstdlib>
#include <stdexcept>
#include <string>

#include "curvflow/simd/kernels.hpp"

namespace curvflow::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(CURVFLOW_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(CURVFLOW_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa))
    throw std::runtime_error("SIMD variant '" + std::string(isa_name(isa)) +
                             "' is not available on this host/build");
  switch (isa) {
#if defined(CURVFLOW_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_table;
#endif
#if defined(CURVFLOW_HAVE_NEON)
    case Isa::neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("CURVFLOW_SIMD")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == isa_name(isa) && isa_supported(isa)) return kernels(isa);
  }
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (isa_supported(isa)) return kernels(isa);
  return detail::scalar_table;
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& active = select();
  return active;
}

}  // namespace curvflow::simd
