#pragma once
// Dense factorizations and matrix functions used across the library.
// Matrices here are small (typically 2..24, at most a few hundred), so
// Jacobi-type methods are preferred for their accuracy.

#include <cstddef>
#include <vector>

#include "lqot/matrix.hpp"

namespace lqot {

struct LuFactors {
  Matrix lu;               // packed L (unit diagonal) and U
  std::vector<int> perm;   // row permutation
  int perm_sign = 1;
};

LuFactors lu_factor(const Matrix& a);  // throws singular_matrix on zero pivot
Vec lu_solve(const LuFactors& f, const Vec& b);
Matrix lu_solve(const LuFactors& f, const Matrix& b);
Matrix inverse(const Matrix& a);
Vec solve(const Matrix& a, const Vec& b);
Matrix solve(const Matrix& a, const Matrix& b);
double det(const Matrix& a);  // product of pivots; 0 if factorization breaks down

// sign in {-1,0,+1}; log_abs is sum(log sigma_i) from a Jacobi SVD. sign is 0
// when smallest/largest singular value <= rel_threshold (and log_abs is then
// the sum over the remaining singular values, provided for diagnostics).
struct DetLog {
  int sign = 0;
  double log_abs = 0.0;
};
DetLog log_abs_det_sign(const Matrix& a, double rel_threshold = 1e-12);

// Descending singular values via one-sided Jacobi (high relative accuracy).
std::vector<double> singular_values(const Matrix& a);
std::size_t rank_with_tolerance(const Matrix& a, double rel_tol = 1e-12);

// Symmetric eigendecomposition (cyclic Jacobi), a = vectors diag(values) vectors^T,
// values ascending. Input is symmetrized internally; callers needing a symmetry
// guarantee must check sym_residual themselves.
struct SymEigen {
  Vec values;
  Matrix vectors;  // columns are eigenvectors
};
SymEigen sym_eigen(const Matrix& a);

// Pade-13 scaling-and-squaring matrix exponential.
Matrix mat_exp(const Matrix& a);

Matrix cholesky(const Matrix& a);  // lower factor; throws not_spd
Matrix spd_sqrt(const Matrix& a);  // symmetric sqrt; throws not_spd when
                                   // min eigenvalue <= 1e-12 * max eigenvalue

// Symmetric positive definite wrapper: validates symmetry (1e-10 relative)
// and positive spectrum at construction.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(Matrix m);
  const Matrix& mat() const { return m_; }
  std::size_t dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

}  // namespace lqot
