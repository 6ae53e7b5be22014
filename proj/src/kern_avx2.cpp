#include "jsdd/kern.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace jsdd::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Sign mask flipping the odd lanes: [ +, -, +, - ].
inline __m256d odd_neg_mask() { return _mm256_setr_pd(0.0, -0.0, 0.0, -0.0); }

}  // namespace

cd cdot(const cd* a, const cd* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    // lanes [ar*br, ai*bi, ...] -> real part after a full lane sum
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    // lanes [ar*bi, -(ai*br), ...] -> imaginary part
    const __m256d vb_sw = _mm256_xor_pd(_mm256_permute_pd(vb, 0x5), odd_neg_mask());
    acc_im = _mm256_fmadd_pd(va, vb_sw, acc_im);
  }
  double re = hsum(acc_re), im = hsum(acc_im);
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double norm_sq(const cd* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(pa + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return s;
}

void axpy(cd alpha, const cd* x, cd* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d vr = _mm256_set1_pd(alpha.real());
  const __m256d vi = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d vx_sw = _mm256_permute_pd(vx, 0x5);
    // even lanes: pr*xr - pi*xi, odd lanes: pr*xi + pi*xr
    const __m256d prod = _mm256_fmaddsub_pd(vr, vx, _mm256_mul_pd(vi, vx_sw));
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(_mm256_loadu_pd(py + 2 * i), prod));
  }
  const double pr = alpha.real(), pi = alpha.imag();
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cd{pr * xr - pi * xi, pr * xi + pi * xr};
  }
}

}  // namespace jsdd::kern::avx2

#else  // translation unit built without AVX2: keep the symbols, defer to scalar

namespace jsdd::kern::avx2 {

cd cdot(const cd* a, const cd* b, std::size_t n) { return scalar::cdot(a, b, n); }
double norm_sq(const cd* a, std::size_t n) { return scalar::norm_sq(a, n); }
void axpy(cd alpha, const cd* x, cd* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }

}  // namespace jsdd::kern::avx2

#endif
