#pragma once

// Data-parallel inner loops of the solver: finite-difference stencils,
// pointwise axisymmetric geometry and Runge-Kutta stage combinations.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The active table
// is chosen once at runtime. The vector variants use the same operation
// order as the scalar code and no fused multiply-add, so all variants
// produce bit-identical results.

#include <cstddef>
#include <string_view>

namespace curvflow::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Outputs of radial_pointwise; every pointer addresses `count` doubles.
struct RadialOut {
  double* lambda_profile;
  double* lambda_orbit;
  double* support;
  double* grad_ratio;
  double* star_margin;
  double* metric;
};

/// Outputs of support_pointwise; every pointer addresses `count` doubles.
struct SupportOut {
  double* tau_profile;
  double* tau_orbit;
  double* lambda_profile;
  double* lambda_orbit;
  double* radial;
  double* grad_ratio;
  double* star_margin;
  double* metric;
};

struct KernelTable {
  Isa isa;

  /// 4th-order central first and second derivatives. `padded` holds
  /// count + 4 values: two ghost nodes on each side of the nodes of interest.
  void (*stencil)(const double* padded, std::size_t count, double inv_12h, double inv_12h2,
                  double* d1, double* d2);

  /// Axisymmetric curvature of a radial graph r(theta):
  ///   m = r^2 + r'^2
  ///   lambda_profile = (r^2 + 2 r'^2 - r r'') / m^(3/2)
  ///   lambda_orbit   = (r - r' cot) / (r sqrt(m))
  ///   support = r^2 / sqrt(m), grad_ratio = |r'| / r, star_margin = r^2 / m
  void (*radial_pointwise)(const double* r, const double* d1, const double* d2,
                           const double* cot, std::size_t count, const RadialOut& out);

  /// Principal radii of a support function u(theta):
  ///   tau_profile = u'' + u, tau_orbit = u' cot + u, lambda = 1 / tau
  ///   radial = sqrt(u^2 + u'^2), grad_ratio = |u'| / u,
  ///   star_margin = u^2 / radial^2, metric = tau_profile^2
  void (*support_pointwise)(const double* u, const double* d1, const double* d2,
                            const double* cot, std::size_t count, const SupportOut& out);

  /// out = y + a * x
  void (*axpy)(std::size_t count, double a, const double* x, const double* y, double* out);

  /// out = y + c * (k1 + 2 k2 + 2 k3 + k4)
  void (*rk4_combine)(std::size_t count, double c, const double* y, const double* k1,
                      const double* k2, const double* k3, const double* k4, double* out);
};

bool isa_supported(Isa isa);

/// Table for a specific instruction set; throws std::runtime_error when the
/// host or the build does not support it.
const KernelTable& kernels(Isa isa);

/// Table selected at first use: the widest supported variant, unless the
/// environment variable CURVFLOW_SIMD names one of scalar / avx2 / neon.
const KernelTable& kernels();

namespace detail {
extern const KernelTable scalar_table;
#if defined(CURVFLOW_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(CURVFLOW_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace curvflow::simd
