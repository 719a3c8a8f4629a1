// Copyright 2026 The SPM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AVX2 + FMA variants of the network kernels. This translation unit is
// compiled with -mavx2 -mfma and must only be entered after the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <cmath>

#include "spm/simd/kernels.hpp"

namespace spm::simd {
namespace {

// Cephes exp for |x| <= ~700: x = n ln2 + r, exp(r) from a Pade form.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000009e0);

  const __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(x, log2e, _mm256_set1_pd(0.5)));
  __m256d r = _mm256_fnmadd_pd(n, c1, x);
  r = _mm256_fnmadd_pd(n, c2, r);
  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d px = _mm256_fmadd_pd(_mm256_fmadd_pd(p0, rr, p1), rr, p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(_mm256_fmadd_pd(_mm256_fmadd_pd(q0, rr, q1), rr, q2), rr, q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // Scale by 2^n through the exponent bits.
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_slli_epi64(_mm256_cvtepi32_epi64(n32), 52);
  return _mm256_castsi256_pd(_mm256_add_epi64(_mm256_castpd_si256(e), n64));
}

// Cephes tanh: rational form below 0.625, 1 - 2/(exp(2|x|)+1) above.
inline __m256d tanh4(__m256d x) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d ax = _mm256_min_pd(_mm256_andnot_pd(sign_mask, x), _mm256_set1_pd(20.0));

  const __m256d s = _mm256_mul_pd(x, x);
  const __m256d p = _mm256_fmadd_pd(
      _mm256_fmadd_pd(_mm256_set1_pd(-9.64399179425052238628e-1), s,
                      _mm256_set1_pd(-9.92877231001918586564e1)),
      s, _mm256_set1_pd(-1.61468768441708447952e3));
  const __m256d q = _mm256_fmadd_pd(
      _mm256_fmadd_pd(_mm256_add_pd(s, _mm256_set1_pd(1.12811678491632931402e2)), s,
                      _mm256_set1_pd(2.23548839060100448583e3)),
      s, _mm256_set1_pd(4.84406305325125486048e3));
  const __m256d small = _mm256_fmadd_pd(_mm256_mul_pd(x, s), _mm256_div_pd(p, q), x);

  const __m256d e = exp4(_mm256_add_pd(ax, ax));
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d large = _mm256_sub_pd(one, _mm256_div_pd(_mm256_set1_pd(2.0), _mm256_add_pd(e, one)));
  large = _mm256_or_pd(large, _mm256_and_pd(sign_mask, x));

  const __m256d use_large = _mm256_cmp_pd(ax, _mm256_set1_pd(0.625), _CMP_GT_OQ);
  return _mm256_blendv_pd(small, large, use_large);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void hidden_forward(const double* x, const double* w1, const double* b1, double* h,
                    std::size_t hidden) {
  const __m256d x0 = _mm256_set1_pd(x[0]);
  const __m256d x1 = _mm256_set1_pd(x[1]);
  const __m256d x2 = _mm256_set1_pd(x[2]);
  const __m256d x3 = _mm256_set1_pd(x[3]);
  const double* r0 = w1;
  const double* r1 = w1 + hidden;
  const double* r2 = w1 + 2 * hidden;
  const double* r3 = w1 + 3 * hidden;
  std::size_t j = 0;
  for (; j + 4 <= hidden; j += 4) {
    __m256d a = _mm256_loadu_pd(b1 + j);
    a = _mm256_fmadd_pd(x0, _mm256_loadu_pd(r0 + j), a);
    a = _mm256_fmadd_pd(x1, _mm256_loadu_pd(r1 + j), a);
    a = _mm256_fmadd_pd(x2, _mm256_loadu_pd(r2 + j), a);
    a = _mm256_fmadd_pd(x3, _mm256_loadu_pd(r3 + j), a);
    _mm256_storeu_pd(h + j, tanh4(a));
  }
  for (; j < hidden; ++j) {
    const double a = b1[j] + x[0] * r0[j] + x[1] * r1[j] + x[2] * r2[j] + x[3] * r3[j];
    h[j] = std::tanh(a);
  }
}

void output_forward(const double* h, const double* w2, const double* b2, double* y,
                    std::size_t hidden) {
  const double* r0 = w2;
  const double* r1 = w2 + hidden;
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  __m256d c0 = _mm256_setzero_pd(), c1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= hidden; j += 8) {
    const __m256d h0 = _mm256_loadu_pd(h + j);
    const __m256d h1 = _mm256_loadu_pd(h + j + 4);
    a0 = _mm256_fmadd_pd(h0, _mm256_loadu_pd(r0 + j), a0);
    c0 = _mm256_fmadd_pd(h1, _mm256_loadu_pd(r0 + j + 4), c0);
    a1 = _mm256_fmadd_pd(h0, _mm256_loadu_pd(r1 + j), a1);
    c1 = _mm256_fmadd_pd(h1, _mm256_loadu_pd(r1 + j + 4), c1);
  }
  double s0 = hsum(_mm256_add_pd(a0, c0));
  double s1 = hsum(_mm256_add_pd(a1, c1));
  for (; j < hidden; ++j) {
    s0 += h[j] * r0[j];
    s1 += h[j] * r1[j];
  }
  y[0] = b2[0] + s0;
  y[1] = b2[1] + s1;
}

void hidden_backward(const double* x, const double* h, const double* dy, const double* w2,
                     double* gw1, double* gb1, double* gw2, std::size_t hidden) {
  const __m256d dy0 = _mm256_set1_pd(dy[0]);
  const __m256d dy1 = _mm256_set1_pd(dy[1]);
  const __m256d x0 = _mm256_set1_pd(x[0]);
  const __m256d x1 = _mm256_set1_pd(x[1]);
  const __m256d x2 = _mm256_set1_pd(x[2]);
  const __m256d x3 = _mm256_set1_pd(x[3]);
  const __m256d one = _mm256_set1_pd(1.0);
  const double* w20 = w2;
  const double* w21 = w2 + hidden;
  double* g20 = gw2;
  double* g21 = gw2 + hidden;
  double* g10 = gw1;
  double* g11 = gw1 + hidden;
  double* g12 = gw1 + 2 * hidden;
  double* g13 = gw1 + 3 * hidden;
  std::size_t j = 0;
  for (; j + 4 <= hidden; j += 4) {
    const __m256d hj = _mm256_loadu_pd(h + j);
    const __m256d g = _mm256_fmadd_pd(dy1, _mm256_loadu_pd(w21 + j), _mm256_mul_pd(dy0, _mm256_loadu_pd(w20 + j)));
    _mm256_storeu_pd(g20 + j, _mm256_fmadd_pd(dy0, hj, _mm256_loadu_pd(g20 + j)));
    _mm256_storeu_pd(g21 + j, _mm256_fmadd_pd(dy1, hj, _mm256_loadu_pd(g21 + j)));
    const __m256d d = _mm256_mul_pd(g, _mm256_fnmadd_pd(hj, hj, one));
    _mm256_storeu_pd(gb1 + j, _mm256_add_pd(_mm256_loadu_pd(gb1 + j), d));
    _mm256_storeu_pd(g10 + j, _mm256_fmadd_pd(x0, d, _mm256_loadu_pd(g10 + j)));
    _mm256_storeu_pd(g11 + j, _mm256_fmadd_pd(x1, d, _mm256_loadu_pd(g11 + j)));
    _mm256_storeu_pd(g12 + j, _mm256_fmadd_pd(x2, d, _mm256_loadu_pd(g12 + j)));
    _mm256_storeu_pd(g13 + j, _mm256_fmadd_pd(x3, d, _mm256_loadu_pd(g13 + j)));
  }
  for (; j < hidden; ++j) {
    const double g = dy[0] * w20[j] + dy[1] * w21[j];
    g20[j] += dy[0] * h[j];
    g21[j] += dy[1] * h[j];
    const double d = g * (1.0 - h[j] * h[j]);
    gb1[j] += d;
    g10[j] += x[0] * d;
    g11[j] += x[1] * d;
    g12[j] += x[2] * d;
    g13[j] += x[3] * d;
  }
}

void adam_update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                 double beta1, double beta2, double c1, double c2, double eps) {
  const __m256d b1 = _mm256_set1_pd(beta1), nb1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d b2 = _mm256_set1_pd(beta2), nb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vc1 = _mm256_set1_pd(c1), vc2 = _mm256_set1_pd(c2);
  const __m256d vlr = _mm256_set1_pd(lr), veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(nb1, gi));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(nb2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d num = _mm256_mul_pd(vlr, _mm256_mul_pd(mi, vc1));
    const __m256d den = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, vc2)), veps);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_div_pd(num, den)));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    p[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

void tanh_inplace(double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, tanh4(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] = std::tanh(x[i]);
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{Isa::kAvx2, hidden_forward, output_forward, hidden_backward,
                                 adam_update, tanh_inplace};
  return table;
}

}  // namespace spm::simd
