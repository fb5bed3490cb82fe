// Compiled with -mavx2 (and deliberately without -mfma); only reached after
// a runtime check for AVX2 support.

#include <immintrin.h>

#include <cmath>

#include "curvflow/simd/kernels.hpp"

namespace curvflow::simd::detail {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d vabs(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

void stencil(const double* p, std::size_t count, double inv_12h, double inv_12h2, double* d1,
             double* d2) {
  const __m256d c8 = _mm256_set1_pd(8.0);
  const __m256d c16 = _mm256_set1_pd(16.0);
  const __m256d c30 = _mm256_set1_pd(30.0);
  const __m256d s1 = _mm256_set1_pd(inv_12h);
  const __m256d s2 = _mm256_set1_pd(inv_12h2);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const double* f = p + i + 2;
    const __m256d fm2 = _mm256_loadu_pd(f - 2);
    const __m256d fm1 = _mm256_loadu_pd(f - 1);
    const __m256d f0 = _mm256_loadu_pd(f);
    const __m256d fp1 = _mm256_loadu_pd(f + 1);
    const __m256d fp2 = _mm256_loadu_pd(f + 2);
    const __m256d a =
        _mm256_add_pd(_mm256_sub_pd(fm2, fp2), _mm256_mul_pd(c8, _mm256_sub_pd(fp1, fm1)));
    _mm256_storeu_pd(d1 + i, _mm256_mul_pd(a, s1));
    const __m256d b = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_mul_pd(c16, _mm256_add_pd(fm1, fp1)), _mm256_add_pd(fm2, fp2)),
        _mm256_mul_pd(c30, f0));
    _mm256_storeu_pd(d2 + i, _mm256_mul_pd(b, s2));
  }
  for (; i < count; ++i) {
    const double* f = p + i + 2;
    d1[i] = ((f[-2] - f[2]) + 8.0 * (f[1] - f[-1])) * inv_12h;
    d2[i] = (16.0 * (f[-1] + f[1]) - (f[-2] + f[2]) - 30.0 * f[0]) * inv_12h2;
  }
}

void radial_pointwise(const double* r, const double* d1, const double* d2, const double* cot,
                      std::size_t count, const RadialOut& out) {
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d rv = _mm256_loadu_pd(r + i);
    const __m256d p = _mm256_loadu_pd(d1 + i);
    const __m256d q = _mm256_loadu_pd(d2 + i);
    const __m256d c = _mm256_loadu_pd(cot + i);
    const __m256d rr = _mm256_mul_pd(rv, rv);
    const __m256d pp = _mm256_mul_pd(p, p);
    const __m256d m = _mm256_add_pd(rr, pp);
    const __m256d sm = _mm256_sqrt_pd(m);
    _mm256_storeu_pd(out.metric + i, m);
    const __m256d num = _mm256_sub_pd(_mm256_add_pd(rr, _mm256_mul_pd(two, pp)),
                                      _mm256_mul_pd(rv, q));
    _mm256_storeu_pd(out.lambda_profile + i, _mm256_div_pd(num, _mm256_mul_pd(m, sm)));
    _mm256_storeu_pd(out.lambda_orbit + i,
                     _mm256_div_pd(_mm256_sub_pd(rv, _mm256_mul_pd(p, c)), _mm256_mul_pd(rv, sm)));
    _mm256_storeu_pd(out.support + i, _mm256_div_pd(rr, sm));
    _mm256_storeu_pd(out.grad_ratio + i, _mm256_div_pd(vabs(p), rv));
    _mm256_storeu_pd(out.star_margin + i, _mm256_div_pd(rr, m));
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
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d uv = _mm256_loadu_pd(u + i);
    const __m256d p = _mm256_loadu_pd(d1 + i);
    const __m256d q = _mm256_loadu_pd(d2 + i);
    const __m256d c = _mm256_loadu_pd(cot + i);
    const __m256d tp = _mm256_add_pd(q, uv);
    const __m256d to = _mm256_add_pd(_mm256_mul_pd(p, c), uv);
    const __m256d uu = _mm256_mul_pd(uv, uv);
    const __m256d rr = _mm256_add_pd(uu, _mm256_mul_pd(p, p));
    _mm256_storeu_pd(out.tau_profile + i, tp);
    _mm256_storeu_pd(out.tau_orbit + i, to);
    _mm256_storeu_pd(out.lambda_profile + i, _mm256_div_pd(one, tp));
    _mm256_storeu_pd(out.lambda_orbit + i, _mm256_div_pd(one, to));
    _mm256_storeu_pd(out.radial + i, _mm256_sqrt_pd(rr));
    _mm256_storeu_pd(out.grad_ratio + i, _mm256_div_pd(vabs(p), uv));
    _mm256_storeu_pd(out.star_margin + i, _mm256_div_pd(uu, rr));
    _mm256_storeu_pd(out.metric + i, _mm256_mul_pd(tp, tp));
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
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                            _mm256_mul_pd(av, _mm256_loadu_pd(x + i))));
  for (; i < count; ++i) out[i] = y[i] + a * x[i];
}

void rk4_combine(std::size_t count, double c, const double* y, const double* k1,
                 const double* k2, const double* k3, const double* k4, double* out) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d s23 = _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i));
    const __m256d s = _mm256_add_pd(
        _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_mul_pd(two, s23)), _mm256_loadu_pd(k4 + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(cv, s)));
  }
  for (; i < count; ++i) out[i] = y[i] + c * ((k1[i] + 2.0 * (k2[i] + k3[i])) + k4[i]);
}

}  // namespace

const KernelTable avx2_table{Isa::avx2, stencil, radial_pointwise, support_pointwise, axpy,
                             rk4_combine};

}  // namespace curvflow::simd::detail
