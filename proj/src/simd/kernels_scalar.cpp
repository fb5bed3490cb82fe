#include <cmath>

#include "curvflow/simd/kernels.hpp"

namespace curvflow::simd::detail {
namespace {

void stencil(const double* p, std::size_t count, double inv_12h, double inv_12h2, double* d1,
             double* d2) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* f = p + i + 2;
    d1[i] = ((f[-2] - f[2]) + 8.0 * (f[1] - f[-1])) * inv_12h;
    d2[i] = (16.0 * (f[-1] + f[1]) - (f[-2] + f[2]) - 30.0 * f[0]) * inv_12h2;
  }
}

void radial_pointwise(const double* r, const double* d1, const double* d2, const double* cot,
                      std::size_t count, const RadialOut& out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double rr = r[i] * r[i];
    const double pp = d1[i] * d1[i];
    const double m = rr + pp;
    const double sm = std::sqrt(m);
    out.metric[i] = m;
    out.lambda_profile[i] = ((rr + 2.0 * pp) - r[i] * d2[i]) / (m * sm);
    out.lambda_orbit[i] = (r[i] - d1[i] * cot[i]) / (r[i] * sm);
    out.support[i] = rr / sm;
    out.grad_ratio[i] = std::abs(d1[i]) / r[i];
    out.star_margin[i] = rr / m;
  }
}

void support_pointwise(const double* u, const double* d1, const double* d2, const double* cot,
                       std::size_t count, const SupportOut& out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double tp = d2[i] + u[i];
    const double to = d1[i] * cot[i] + u[i];
    const double uu = u[i] * u[i];
    const double rr = uu + d1[i] * d1[i];
    out.tau_profile[i] = tp;
    out.tau_orbit[i] = to;
    out.lambda_profile[i] = 1.0 / tp;
    out.lambda_orbit[i] = 1.0 / to;
    out.radial[i] = std::sqrt(rr);
    out.grad_ratio[i] = std::abs(d1[i]) / u[i];
    out.star_margin[i] = uu / rr;
    out.metric[i] = tp * tp;
  }
}

void axpy(std::size_t count, double a, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < count; ++i) out[i] = y[i] + a * x[i];
}

void rk4_combine(std::size_t count, double c, const double* y, const double* k1,
                 const double* k2, const double* k3, const double* k4, double* out) {
  for (std::size_t i = 0; i < count; ++i)
    out[i] = y[i] + c * ((k1[i] + 2.0 * (k2[i] + k3[i])) + k4[i]);
}

}  // namespace

const KernelTable scalar_table{Isa::scalar, stencil, radial_pointwise, support_pointwise, axpy,
                               rk4_combine};

}  // namespace curvflow::simd::detail
