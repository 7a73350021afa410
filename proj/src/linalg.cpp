#include "lqot/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "lqot/kernels.hpp"

namespace lqot {

LuFactors lu_factor(const Matrix& a) {
  if (!a.is_square())
    fail(ErrorCode::dimension_mismatch, "lu_factor needs a square matrix");
  const std::size_t n = a.rows();
  LuFactors f{a, std::vector<int>(n), 1};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = static_cast<int>(i);
  Matrix& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0)
      fail(ErrorCode::singular_matrix, "singular matrix in LU factorization");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.perm_sign = -f.perm_sign;
    }
    const double inv_piv = 1.0 / m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = m(i, k) * inv_piv;
      m(i, k) = l;
      if (l != 0.0) kernels::axpy(n - k - 1, -l, m.row(k) + k + 1, m.row(i) + k + 1);
    }
  }
  return f;
}

Vec lu_solve(const LuFactors& f, const Vec& b) {
  const std::size_t n = f.lu.rows();
  if (b.size() != n)
    fail(ErrorCode::dimension_mismatch, "lu_solve rhs size mismatch");
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[static_cast<std::size_t>(f.perm[i])];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * y[j];
    y[ii] = s / f.lu(ii, ii);
  }
  return y;
}

Matrix lu_solve(const LuFactors& f, const Matrix& b) {
  const std::size_t n = f.lu.rows();
  if (b.rows() != n)
    fail(ErrorCode::dimension_mismatch, "lu_solve rhs shape mismatch");
  Matrix x(n, b.cols());
  Vec col(n);
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
    Vec sol = lu_solve(f, col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
  }
  return x;
}

Matrix inverse(const Matrix& a) {
  return lu_solve(lu_factor(a), Matrix::identity(a.rows()));
}

Vec solve(const Matrix& a, const Vec& b) { return lu_solve(lu_factor(a), b); }
Matrix solve(const Matrix& a, const Matrix& b) {
  return lu_solve(lu_factor(a), b);
}

double det(const Matrix& a) {
  LuFactors f;
  try {
    f = lu_factor(a);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular_matrix) return 0.0;
    throw;
  }
  double d = f.perm_sign;
  for (std::size_t i = 0; i < a.rows(); ++i) d *= f.lu(i, i);
  return d;
}

namespace {

// One-sided Jacobi on the columns: returns squared column norms of the
// rotated matrix, i.e. squared singular values.
std::vector<double> jacobi_singular_sq(Matrix w) {
  const std::size_t m = w.rows(), n = w.cols();
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double vp = w(i, p), vq = w(i, q);
          app += vp * vp;
          aqq += vq * vq;
          apq += vp * vq;
        }
        if (std::fabs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0)
          continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double vp = w(i, p), vq = w(i, q);
          w(i, p) = c * vp - s * vq;
          w(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sq(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
    sq[j] = s;
  }
  return sq;
}

}  // namespace

std::vector<double> singular_values(const Matrix& a) {
  if (a.empty()) return {};
  Matrix w = a.rows() >= a.cols() ? a : a.transpose();
  std::vector<double> sq = jacobi_singular_sq(std::move(w));
  std::vector<double> sv(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sv[i] = std::sqrt(sq[i]);
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

std::size_t rank_with_tolerance(const Matrix& a, double rel_tol) {
  const std::vector<double> sv = singular_values(a);
  if (sv.empty() || sv[0] == 0.0) return 0;
  std::size_t r = 0;
  for (double s : sv)
    if (s > rel_tol * sv[0]) ++r;
  return r;
}

DetLog log_abs_det_sign(const Matrix& a, double rel_threshold) {
  if (!a.is_square())
    fail(ErrorCode::dimension_mismatch, "determinant of non-square matrix");
  if (a.rows() == 0) return {1, 0.0};
  const std::vector<double> sv = singular_values(a);
  DetLog out;
  if (sv[0] == 0.0 || sv.back() <= rel_threshold * sv[0]) {
    out.sign = 0;
    for (double s : sv)
      if (s > rel_threshold * sv[0]) out.log_abs += std::log(s);
    return out;
  }
  out.log_abs = 0.0;
  for (double s : sv) out.log_abs += std::log(s);
  // Sign from the LU permutation and pivot signs.
  const LuFactors f = lu_factor(a);
  int sign = f.perm_sign;
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (f.lu(i, i) < 0.0) sign = -sign;
  out.sign = sign;
  return out;
}

SymEigen sym_eigen(const Matrix& a) {
  if (!a.is_square())
    fail(ErrorCode::dimension_mismatch, "sym_eigen needs a square matrix");
  const std::size_t n = a.rows();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);
  const int max_sweeps = 64;
  const double scale = m.max_abs() > 0.0 ? m.max_abs() : 1.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        off = std::max(off, std::fabs(m(p, q)));
    if (off <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (std::fabs(apq) <= 1e-18 * scale) continue;
        const double zeta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double mip = m(i, p), miq = m(i, q);
          m(i, p) = c * mip - s * miq;
          m(i, q) = s * mip + c * miq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double mpj = m(p, j), mqj = m(q, j);
          m(p, j) = c * mpj - s * mqj;
          m(q, j) = s * mpj + c * mqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  SymEigen e;
  e.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.values[i] = m(i, i);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return e.values[x] < e.values[y];
  });
  SymEigen sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    sorted.values[k] = e.values[order[k]];
    for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, k) = v(i, order[k]);
  }
  return sorted;
}

namespace {

const double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
const double kTheta13 = 5.371920351148152;

}  // namespace

Matrix mat_exp(const Matrix& a) {
  if (!a.is_square())
    fail(ErrorCode::dimension_mismatch, "mat_exp needs a square matrix");
  if (!a.all_finite())
    fail(ErrorCode::invalid_argument, "mat_exp input must be finite");
  const std::size_t n = a.rows();
  if (n == 0) return a;

  const double norm = a.one_norm();
  int s = 0;
  if (norm > kTheta13)
    s = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  Matrix m = a;
  if (s > 0) m *= std::ldexp(1.0, -s);

  const Matrix ident = Matrix::identity(n);
  const Matrix m2 = m * m;
  const Matrix m4 = m2 * m2;
  const Matrix m6 = m4 * m2;

  Matrix u_inner = kPade13[13] * m6 + kPade13[11] * m4 + kPade13[9] * m2;
  Matrix u = m * (m6 * u_inner + kPade13[7] * m6 + kPade13[5] * m4 +
                  kPade13[3] * m2 + kPade13[1] * ident);
  Matrix v_inner = kPade13[12] * m6 + kPade13[10] * m4 + kPade13[8] * m2;
  Matrix v = m6 * v_inner + kPade13[6] * m6 + kPade13[4] * m4 +
             kPade13[2] * m2 + kPade13[0] * ident;

  Matrix r = solve(v - u, v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

Matrix cholesky(const Matrix& a) {
  if (!a.is_square())
    fail(ErrorCode::dimension_mismatch, "cholesky needs a square matrix");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) fail(ErrorCode::not_spd, "matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.5 * (a(i, j) + a(j, i));
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Matrix spd_sqrt(const Matrix& a) {
  const SymEigen e = sym_eigen(a);
  const std::size_t n = a.rows();
  if (n == 0) return a;
  const double max_eig = e.values.back();
  // Reject genuinely indefinite input, but tolerate ill-conditioned matrices
  // whose smallest eigenvalue only dips below zero at roundoff level; those
  // arise from conjugating covariances by near-singular flow blocks.
  if (max_eig <= 0.0 || e.values.front() <= -1e-12 * max_eig)
    fail(ErrorCode::not_spd, "spd_sqrt: spectrum not positive definite");
  Matrix scaled = e.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = std::sqrt(std::max(e.values[j], 0.0));
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= r;
  }
  Matrix out = scaled * e.vectors.transpose();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

SpdMatrix::SpdMatrix(Matrix m) : m_(std::move(m)) {
  if (!m_.is_square())
    fail(ErrorCode::dimension_mismatch, "covariance must be square");
  if (m_.rows() == 0)
    fail(ErrorCode::invalid_argument, "covariance must be non-empty");
  if (sym_residual(m_) > 1e-10)
    fail(ErrorCode::not_symmetric, "matrix is not symmetric");
  const SymEigen e = sym_eigen(m_);
  if (e.values.front() <= 0.0)
    fail(ErrorCode::not_spd, "matrix is not positive definite");
}

}  // namespace lqot
