// aarch64 only. Advanced SIMD is mandatory there, so no runtime check is
// needed beyond the build-time guard.

#include <arm_neon.h>

#include <cmath>

#include "curvflow/simd/kernels.hpp"

namespace curvflow::simd::detail {
namespace {

constexpr std::size_t kLanes = 2;

void stencil(const double* p, std::size_t count, double inv_12h, double inv_12h2, double* d1,
             double* d2) {
  const float64x2_t c8 = vdupq_n_f64(8.0);
  const float64x2_t c16 = vdupq_n_f64(16.0);
  const float64x2_t c30 = vdupq_n_f64(30.0);
  const float64x2_t s1 = vdupq_n_f64(inv_12h);
  const float64x2_t s2 = vdupq_n_f64(inv_12h2);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const double* f = p + i + 2;
    const float64x2_t fm2 = vld1q_f64(f - 2);
    const float64x2_t fm1 = vld1q_f64(f - 1);
    const float64x2_t f0 = vld1q_f64(f);
    const float64x2_t fp1 = vld1q_f64(f + 1);
    const float64x2_t fp2 = vld1q_f64(f + 2);
    const float64x2_t a = vaddq_f64(vsubq_f64(fm2, fp2), vmulq_f64(c8, vsubq_f64(fp1, fm1)));
    vst1q_f64(d1 + i, vmulq_f64(a, s1));
    const float64x2_t b = vsubq_f64(
        vsubq_f64(vmulq_f64(c16, vaddq_f64(fm1, fp1)), vaddq_f64(fm2, fp2)), vmulq_f64(c30, f0));
    vst1q_f64(d2 + i, vmulq_f64(b, s2));
  }
  for (; i < count; ++i) {
    const double* f = p + i + 2;
    d1[i] = ((f[-2] - f[2]) + 8.0 * (f[1] - f[-1])) * inv_12h;
    d2[i] = (16.0 * (f[-1] + f[1]) - (f[-2] + f[2]) - 30.0 * f[0]) * inv_12h2;
  }
}

void radial_pointwise(const double* r, const double* d1, const double* d2, const double* cot,
                      std::size_t count, const RadialOut& out) {
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const float64x2_t rv = vld1q_f64(r + i);
    const float64x2_t p = vld1q_f64(d1 + i);
    const float64x2_t q = vld1q_f64(d2 + i);
    const float64x2_t c = vld1q_f64(cot + i);
    const float64x2_t rr = vmulq_f64(rv, rv);
    const float64x2_t pp = vmulq_f64(p, p);
    const float64x2_t m = vaddq_f64(rr, pp);
    const float64x2_t sm = vsqrtq_f64(m);
    vst1q_f64(out.metric + i, m);
    const float64x2_t num = vsubq_f64(vaddq_f64(rr, vmulq_f64(two, pp)), vmulq_f64(rv, q));
    vst1q_f64(out.lambda_profile + i, vdivq_f64(num, vmulq_f64(m, sm)));
    vst1q_f64(out.lambda_orbit + i,
              vdivq_f64(vsubq_f64(rv, vmulq_f64(p, c)), vmulq_f64(rv, sm)));
    vst1q_f64(out.support + i, vdivq_f64(rr, sm));
    vst1q_f64(out.grad_ratio + i, vdivq_f64(vabsq_f64(p), rv));
    vst1q_f64(out.star_margin + i, vdivq_f64(rr, m));
  }
  for (; i < count; ++i) {
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
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const float64x2_t uv = vld1q_f64(u + i);
    const float64x2_t p = vld1q_f64(d1 + i);
    const float64x2_t q = vld1q_f64(d2 + i);
    const float64x2_t c = vld1q_f64(cot + i);
    const float64x2_t tp = vaddq_f64(q, uv);
    const float64x2_t to = vaddq_f64(vmulq_f64(p, c), uv);
    const float64x2_t uu = vmulq_f64(uv, uv);
    const float64x2_t rr = vaddq_f64(uu, vmulq_f64(p, p));
    vst1q_f64(out.tau_profile + i, tp);
    vst1q_f64(out.tau_orbit + i, to);
    vst1q_f64(out.lambda_profile + i, vdivq_f64(one, tp));
    vst1q_f64(out.lambda_orbit + i, vdivq_f64(one, to));
    vst1q_f64(out.radial + i, vsqrtq_f64(rr));
    vst1q_f64(out.grad_ratio + i, vdivq_f64(vabsq_f64(p), uv));
    vst1q_f64(out.star_margin + i, vdivq_f64(uu, rr));
    vst1q_f64(out.metric + i, vmulq_f64(tp, tp));
  }
  for (; i < count; ++i) {
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
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes)
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(av, vld1q_f64(x + i))));
  for (; i < count; ++i) out[i] = y[i] + a * x[i];
}

void rk4_combine(std::size_t count, double c, const double* y, const double* k1,
                 const double* k2, const double* k3, const double* k4, double* out) {
  const float64x2_t cv = vdupq_n_f64(c);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const float64x2_t s23 = vaddq_f64(vld1q_f64(k2 + i), vld1q_f64(k3 + i));
    const float64x2_t s =
        vaddq_f64(vaddq_f64(vld1q_f64(k1 + i), vmulq_f64(two, s23)), vld1q_f64(k4 + i));
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(cv, s)));
  }
  for (; i < count; ++i) out[i] = y[i] + c * ((k1[i] + 2.0 * (k2[i] + k3[i])) + k4[i]);
}

}  // namespace

const KernelTable neon_table{Isa::neon, stencil, radial_pointwise, support_pointwise, axpy,
                             rk4_combine};

}  // namespace curvflow::simd::detail
