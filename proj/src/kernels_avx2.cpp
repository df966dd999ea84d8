// AVX2+FMA variants of the flat-array kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; callers reach it through the runtime
// dispatch in kernels.cpp, never directly.

#include "gldual/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace gldual::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double dot_(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = hsum(acc0);
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double sup_abs_(const double* x, std::size_t n) {
  __m256d m0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m0 = _mm256_max_pd(m0, abs_pd(_mm256_loadu_pd(x + i)));
  double m = hmax(m0);
  for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

double well_sum_(const double* u, double beta, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d uu = _mm256_loadu_pd(u + i);
    __m256d t = _mm256_fmsub_pd(uu, uu, vb);
    acc0 = _mm256_fmadd_pd(t, t, acc0);
  }
  double acc = hsum(acc0);
  for (; i < n; ++i) {
    const double t = u[i] * u[i] - beta;
    acc += t * t;
  }
  return acc;
}

double well_shift_sum_(const double* u, const double* v, double beta,
                       std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d uu = _mm256_loadu_pd(u + i);
    __m256d t = _mm256_add_pd(_mm256_fmsub_pd(uu, uu, vb), _mm256_loadu_pd(v + i));
    acc0 = _mm256_fmadd_pd(t, t, acc0);
  }
  double acc = hsum(acc0);
  for (; i < n; ++i) {
    const double t = u[i] * u[i] - beta + v[i];
    acc += t * t;
  }
  return acc;
}

double ratio_quad_sum_(const double* a, const double* b, double K,
                       std::size_t n) {
  const __m256d vK = _mm256_set1_pd(K);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d den = _mm256_fmsub_pd(two, _mm256_loadu_pd(b + i), vK);
    acc0 = _mm256_add_pd(acc0, _mm256_div_pd(_mm256_mul_pd(va, va), den));
  }
  double acc = hsum(acc0);
  for (; i < n; ++i) acc += a[i] * a[i] / (2.0 * b[i] - K);
  return acc;
}

void axpy_(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void clamp_box_(double* x, double lo, double hi, std::size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        x + i, _mm256_min_pd(vhi, _mm256_max_pd(vlo, _mm256_loadu_pd(x + i))));
  for (; i < n; ++i) x[i] = std::min(hi, std::max(lo, x[i]));
}

void cubic_well_(const double* u, double beta, double c, double* out,
                 std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d uu = _mm256_loadu_pd(u + i);
    __m256d t = _mm256_fmsub_pd(uu, uu, vb);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(vc, t), uu));
  }
  for (; i < n; ++i) out[i] = c * (u[i] * u[i] - beta) * u[i];
}

void sq_affine_(const double* u, double a, double b, double* out,
                std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d uu = _mm256_loadu_pd(u + i);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_mul_pd(uu, uu), vb));
  }
  for (; i < n; ++i) out[i] = a * u[i] * u[i] + b;
}

void neg_ratio_(const double* a, const double* b, double K, double* out,
                std::size_t n) {
  const __m256d vK = _mm256_set1_pd(K);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d neg = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d den = _mm256_fmsub_pd(two, _mm256_loadu_pd(b + i), vK);
    __m256d q = _mm256_div_pd(_mm256_loadu_pd(a + i), den);
    _mm256_storeu_pd(out + i, _mm256_xor_pd(q, neg));
  }
  for (; i < n; ++i) out[i] = -a[i] / (2.0 * b[i] - K);
}

void stencil1_(double c, const double* u, const double* diag, double* out,
               std::size_t m) {
  if (m == 0) return;
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d two = _mm256_set1_pd(2.0);
  // endpoints touch the zero boundary; handle them scalar
  out[0] = c * (2.0 * u[0] - ((m > 1) ? u[1] : 0.0)) + diag[0] * u[0];
  std::size_t i = 1;
  if (m > 2) {
    for (; i + 4 <= m - 1; i += 4) {
      __m256d uc = _mm256_loadu_pd(u + i);
      __m256d ul = _mm256_loadu_pd(u + i - 1);
      __m256d ur = _mm256_loadu_pd(u + i + 1);
      __m256d lap = _mm256_sub_pd(_mm256_mul_pd(two, uc), _mm256_add_pd(ul, ur));
      __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(diag + i), uc,
                                  _mm256_mul_pd(vc, lap));
      _mm256_storeu_pd(out + i, r);
    }
    for (; i < m - 1; ++i)
      out[i] = c * (2.0 * u[i] - u[i - 1] - u[i + 1]) + diag[i] * u[i];
  }
  if (m > 1)
    out[m - 1] = c * (2.0 * u[m - 1] - u[m - 2]) + diag[m - 1] * u[m - 1];
}

void stencil2_(double cx, double cy, const double* u, const double* diag,
               double* out, std::size_t mx, std::size_t my) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t iy = 0; iy < my; ++iy) {
    const double* row = u + iy * mx;
    const double* down = (iy > 0) ? row - mx : nullptr;
    const double* up = (iy + 1 < my) ? row + mx : nullptr;
    double* o = out + iy * mx;
    const double* d = diag + iy * mx;

    auto scalar_at = [&](std::size_t ix) {
      const double left = (ix > 0) ? row[ix - 1] : 0.0;
      const double right = (ix + 1 < mx) ? row[ix + 1] : 0.0;
      const double lo = down ? down[ix] : 0.0;
      const double hi = up ? up[ix] : 0.0;
      o[ix] = cx * (2.0 * row[ix] - left - right) +
              cy * (2.0 * row[ix] - lo - hi) + d[ix] * row[ix];
    };

    scalar_at(0);
    std::size_t ix = 1;
    if (mx > 2) {
      for (; ix + 4 <= mx - 1; ix += 4) {
        __m256d uc = _mm256_loadu_pd(row + ix);
        __m256d ul = _mm256_loadu_pd(row + ix - 1);
        __m256d ur = _mm256_loadu_pd(row + ix + 1);
        __m256d ud = down ? _mm256_loadu_pd(down + ix) : zero;
        __m256d uu = up ? _mm256_loadu_pd(up + ix) : zero;
        __m256d lapx = _mm256_sub_pd(_mm256_mul_pd(two, uc), _mm256_add_pd(ul, ur));
        __m256d lapy = _mm256_sub_pd(_mm256_mul_pd(two, uc), _mm256_add_pd(ud, uu));
        __m256d r = _mm256_mul_pd(vcx, lapx);
        r = _mm256_fmadd_pd(vcy, lapy, r);
        r = _mm256_fmadd_pd(_mm256_loadu_pd(d + ix), uc, r);
        _mm256_storeu_pd(o + ix, r);
      }
      for (; ix < mx - 1; ++ix) scalar_at(ix);
    }
    if (mx > 1) scalar_at(mx - 1);
  }
}

}  // namespace

const Backend* avx2_impl() {
  static const Backend b{
      "avx2",        dot_,       sum_,       sup_abs_,  well_sum_,
      well_shift_sum_, ratio_quad_sum_, axpy_, scal_,  clamp_box_,
      cubic_well_,   sq_affine_, neg_ratio_, stencil1_, stencil2_,
  };
  return &b;
}

}  // namespace gldual::kernels

#else

namespace gldual::kernels {
const Backend* avx2_impl() { return nullptr; }
}  // namespace gldual::kernels

#endif
