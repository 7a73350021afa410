#pragma once
// Batched numeric kernels with runtime-dispatched backends.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2+FMA
// variant is compiled in a separate translation unit and selected at startup
// when the CPU supports it. Set LQOT_KERNELS=scalar (or avx2/neon) to force a
// backend; unavailable choices fall back to scalar.

#include <cstddef>
#include <cstdint>

namespace lqot::kernels {

struct Ops {
  // y[i] += a * x[i]
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // x[i] *= a
  void (*scale)(std::size_t n, double a, double* x);
  double (*dot)(std::size_t n, const double* x, const double* y);
  double (*sum)(std::size_t n, const double* x);
  double (*min)(std::size_t n, const double* x);
  // C = A * B with A (r x k), B (k x c), all row-major; C must not alias A/B.
  void (*matmul)(std::size_t r, std::size_t k, std::size_t c, const double* a,
                 const double* b, double* c_out);
  // out[i,:] = shift + lt^T applied to pts[i,:], where lt is the transposed
  // linear part (din x dout row-major). pts is count x din, out count x dout.
  void (*batch_affine)(std::size_t count, std::size_t din, std::size_t dout,
                       const double* pts, const double* lt, const double* shift,
                       double* out);
  // q[i] = pts[i,:]^T m pts[i,:], m is d x d row-major, pts count x d.
  void (*batch_quadform)(std::size_t count, std::size_t d, const double* pts,
                         const double* m, double* q);
  // q[i] = |pts[i,:]|^2
  void (*batch_sqnorm)(std::size_t count, std::size_t d, const double* pts,
                       double* q);
};

enum class Backend { scalar = 0, avx2 = 1, neon = 2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);
Backend active_backend();
// Table for a specific backend; falls back to scalar when unavailable.
const Ops& table(Backend b);
// Active table (env override applied once at first use).
const Ops& ops();

extern const Ops scalar_ops;
#if defined(LQOT_BUILD_AVX2)
extern const Ops avx2_ops;
#endif
#if defined(LQOT_BUILD_NEON)
extern const Ops neon_ops;
#endif

inline void axpy(std::size_t n, double a, const double* x, double* y) {
  ops().axpy(n, a, x, y);
}
inline void scale(std::size_t n, double a, double* x) { ops().scale(n, a, x); }
inline double dot(std::size_t n, const double* x, const double* y) {
  return ops().dot(n, x, y);
}
inline double sum(std::size_t n, const double* x) { return ops().sum(n, x); }
inline double min(std::size_t n, const double* x) { return ops().min(n, x); }
inline void matmul(std::size_t r, std::size_t k, std::size_t c, const double* a,
                   const double* b, double* c_out) {
  ops().matmul(r, k, c, a, b, c_out);
}
inline void batch_affine(std::size_t count, std::size_t din, std::size_t dout,
                         const double* pts, const double* lt,
                         const double* shift, double* out) {
  ops().batch_affine(count, din, dout, pts, lt, shift, out);
}
inline void batch_quadform(std::size_t count, std::size_t d, const double* pts,
                           const double* m, double* q) {
  ops().batch_quadform(count, d, pts, m, q);
}
inline void batch_sqnorm(std::size_t count, std::size_t d, const double* pts,
                         double* q) {
  ops().batch_sqnorm(count, d, pts, q);
}

}  // namespace lqot::kernels
