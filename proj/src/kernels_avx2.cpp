// AVX2 + FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; it is only entered after the dispatcher has confirmed CPU
// support. Results may differ from the scalar reference in the last few ulps
// (FMA contraction, vectorized accumulation order).

#include <immintrin.h>

#include <cstring>
#include <limits>

#include "lqot/kernels.hpp"

namespace lqot::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(std::size_t n, double a, double* x) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double sum_avx2(std::size_t n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double min_avx2(std::size_t n, const double* x) {
  double m = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4)
      vm = _mm256_min_pd(vm, _mm256_loadu_pd(x + i));
    __m128d lo = _mm256_castpd256_pd128(vm);
    __m128d hi = _mm256_extractf128_pd(vm, 1);
    lo = _mm_min_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    m = _mm_cvtsd_f64(_mm_min_sd(lo, swapped));
  }
  for (; i < n; ++i) m = x[i] < m ? x[i] : m;
  return m;
}

void matmul_avx2(std::size_t r, std::size_t k, std::size_t c, const double* a,
                 const double* b, double* out) {
  std::memset(out, 0, r * c * sizeof(double));
  for (std::size_t i = 0; i < r; ++i) {
    const double* arow = a + i * k;
    double* orow = out + i * c;
    for (std::size_t l = 0; l < k; ++l) {
      const __m256d av = _mm256_set1_pd(arow[l]);
      const double* brow = b + l * c;
      std::size_t j = 0;
      for (; j + 4 <= c; j += 4) {
        __m256d vo = _mm256_loadu_pd(orow + j);
        vo = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), vo);
        _mm256_storeu_pd(orow + j, vo);
      }
      for (; j < c; ++j) orow[j] += arow[l] * brow[j];
    }
  }
}

void batch_affine_avx2(std::size_t count, std::size_t din, std::size_t dout,
                       const double* pts, const double* lt, const double* shift,
                       double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = pts + i * din;
    double* o = out + i * dout;
    std::memcpy(o, shift, dout * sizeof(double));
    for (std::size_t kk = 0; kk < din; ++kk) {
      const __m256d pv = _mm256_set1_pd(p[kk]);
      const double* lrow = lt + kk * dout;
      std::size_t j = 0;
      for (; j + 4 <= dout; j += 4) {
        __m256d vo = _mm256_loadu_pd(o + j);
        vo = _mm256_fmadd_pd(pv, _mm256_loadu_pd(lrow + j), vo);
        _mm256_storeu_pd(o + j, vo);
      }
      for (; j < dout; ++j) o[j] += p[kk] * lrow[j];
    }
  }
}

void batch_quadform_avx2(std::size_t count, std::size_t d, const double* pts,
                         const double* m, double* q) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = pts + i * d;
    double acc = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      const double* mrow = m + r * d;
      __m256d vrow = _mm256_setzero_pd();
      std::size_t c = 0;
      for (; c + 4 <= d; c += 4)
        vrow = _mm256_fmadd_pd(_mm256_loadu_pd(mrow + c),
                               _mm256_loadu_pd(p + c), vrow);
      double row = hsum(vrow);
      for (; c < d; ++c) row += mrow[c] * p[c];
      acc += p[r] * row;
    }
    q[i] = acc;
  }
}

void batch_sqnorm_avx2(std::size_t count, std::size_t d, const double* pts,
                       double* q) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = pts + i * d;
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= d; c += 4) {
      __m256d v = _mm256_loadu_pd(p + c);
      acc = _mm256_fmadd_pd(v, v, acc);
    }
    double r = hsum(acc);
    for (; c < d; ++c) r += p[c] * p[c];
    q[i] = r;
  }
}

}  // namespace

const Ops avx2_ops = {
    axpy_avx2,         scale_avx2,    dot_avx2,
    sum_avx2,          min_avx2,      matmul_avx2,
    batch_affine_avx2, batch_quadform_avx2, batch_sqnorm_avx2,
};

}  // namespace lqot::kernels
