// Scalar reference kernels. These define the semantics the SIMD variants are
// equivalence-tested against.

#include <cstring>
#include <limits>

#include "lqot/kernels.hpp"

namespace lqot::kernels {
namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_scalar(std::size_t n, const double* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double min_scalar(std::size_t n, const double* x) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] < m ? x[i] : m;
  return m;
}

void matmul_scalar(std::size_t r, std::size_t k, std::size_t c, const double* a,
                   const double* b, double* out) {
  std::memset(out, 0, r * c * sizeof(double));
  for (std::size_t i = 0; i < r; ++i) {
    const double* arow = a + i * k;
    double* orow = out + i * c;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = arow[l];
      const double* brow = b + l * c;
      for (std::size_t j = 0; j < c; ++j) orow[j] += av * brow[j];
    }
  }
}

void batch_affine_scalar(std::size_t count, std::size_t din, std::size_t dout,
                         const double* pts, const double* lt,
                         const double* shift, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = pts + i * din;
    double* o = out + i * dout;
    std::memcpy(o, shift, dout * sizeof(double));
    for (std::size_t k = 0; k < din; ++k) {
      const double pv = p[k];
      const double* lrow = lt + k * dout;
      for (std::size_t j = 0; j < dout; ++j) o[j] += pv * lrow[j];
    }
  }
}

void batch_quadform_scalar(std::size_t count, std::size_t d, const double* pts,
                           const double* m, double* q) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = pts + i * d;
    double acc = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      const double* mrow = m + r * d;
      double row = 0.0;
      for (std::size_t c = 0; c < d; ++c) row += mrow[c] * p[c];
      acc += p[r] * row;
    }
    q[i] = acc;
  }
}

void batch_sqnorm_scalar(std::size_t count, std::size_t d, const double* pts,
                         double* q) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* p = pts + i * d;
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) acc += p[c] * p[c];
    q[i] = acc;
  }
}

}  // namespace

const Ops scalar_ops = {
    axpy_scalar,         scale_scalar,    dot_scalar,
    sum_scalar,          min_scalar,      matmul_scalar,
    batch_affine_scalar, batch_quadform_scalar, batch_sqnorm_scalar,
};

}  // namespace lqot::kernels
