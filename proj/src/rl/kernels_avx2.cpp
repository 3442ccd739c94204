#include <immintrin.h>

#include "auvsim/rl/kernels.hpp"

namespace auvsim::rl::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Four output rows at a time so each load of x feeds four FMAs.
void affine_avx2(const double* w, const double* b, const double* x, double* y, std::size_t out,
                 std::size_t in) {
  std::size_t o = 0;
  for (; o + 4 <= out; o += 4) {
    const double* w0 = w + o * in;
    const double* w1 = w0 + in;
    const double* w2 = w1 + in;
    const double* w3 = w2 + in;
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= in; i += 4) {
      const __m256d xv = _mm256_loadu_pd(x + i);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + i), xv, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + i), xv, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + i), xv, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + i), xv, a3);
    }
    double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
    for (; i < in; ++i) {
      s0 += w0[i] * x[i];
      s1 += w1[i] * x[i];
      s2 += w2[i] * x[i];
      s3 += w3[i] * x[i];
    }
    y[o] = b[o] + s0;
    y[o + 1] = b[o + 1] + s1;
    y[o + 2] = b[o + 2] + s2;
    y[o + 3] = b[o + 3] + s3;
  }
  for (; o < out; ++o) y[o] = b[o] + dot_avx2(w + o * in, x, in);
}

}  // namespace

const Table* avx2_table() {
  static const Table t{Isa::kAvx2, dot_avx2, axpy_avx2, affine_avx2};
  return &t;
}

}  // namespace auvsim::rl::kernels
