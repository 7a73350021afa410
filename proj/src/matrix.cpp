#include "lqot/matrix.hpp"

#include <cmath>
#include <utility>

#include "lqot/kernels.hpp"

namespace lqot {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    fail(ErrorCode::dimension_mismatch, "matrix data size mismatch");
  if (!all_finite())
    fail(ErrorCode::invalid_argument, "matrix entries must be finite");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return Matrix();
  const std::size_t c = rows[0].size();
  Matrix m(rows.size(), c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != c)
      fail(ErrorCode::dimension_mismatch, "ragged rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  if (!m.all_finite())
    fail(ErrorCode::invalid_argument, "matrix entries must be finite");
  return m;
}

Matrix Matrix::diag(const Vec& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(std::size_t i0, std::size_t j0, std::size_t r,
                     std::size_t c) const {
  if (i0 + r > rows_ || j0 + c > cols_)
    fail(ErrorCode::dimension_mismatch, "block out of range");
  Matrix b(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
  return b;
}

void Matrix::set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
  if (i0 + b.rows() > rows_ || j0 + b.cols() > cols_)
    fail(ErrorCode::dimension_mismatch, "block out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      (*this)(i0 + i, j0 + j) = b(i, j);
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    fail(ErrorCode::dimension_mismatch, "matrix add shape mismatch");
  kernels::axpy(data_.size(), 1.0, o.data_.data(), data_.data());
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    fail(ErrorCode::dimension_mismatch, "matrix sub shape mismatch");
  kernels::axpy(data_.size(), -1.0, o.data_.data(), data_.data());
  return *this;
}

Matrix& Matrix::operator*=(double a) {
  kernels::scale(data_.size(), a, data_.data());
  return *this;
}

Vec Matrix::apply(const Vec& x) const {
  if (x.size() != cols_)
    fail(ErrorCode::dimension_mismatch, "matvec shape mismatch");
  Vec y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    y[i] = kernels::dot(cols_, row(i), x.data());
  return y;
}

Vec Matrix::apply_transposed(const Vec& x) const {
  if (x.size() != rows_)
    fail(ErrorCode::dimension_mismatch, "matvec shape mismatch");
  Vec y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    kernels::axpy(cols_, x[i], row(i), y.data());
  return y;
}

double Matrix::frobenius_norm() const {
  return std::sqrt(kernels::dot(data_.size(), data_.data(), data_.data()));
}

double Matrix::one_norm() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::fabs((*this)(i, j));
    best = s > best ? s : best;
  }
  return best;
}

double Matrix::inf_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
    best = s > best ? s : best;
  }
  return best;
}

double Matrix::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::fabs(v) > best ? std::fabs(v) : best;
  return best;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorCode::dimension_mismatch, "matmul shape mismatch");
  Matrix c(a.rows(), b.cols());
  kernels::matmul(a.rows(), a.cols(), b.cols(), a.data(), b.data(), c.data());
  return c;
}

Matrix operator*(double a, Matrix m) { return m *= a; }
Matrix operator*(Matrix m, double a) { return m *= a; }
Matrix operator-(Matrix m) { return m *= -1.0; }

double sym_residual(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double d = std::fabs(m(i, j) - m(j, i));
      worst = d > worst ? d : worst;
    }
  const double scale = m.max_abs();
  return worst / (scale > 1.0 ? scale : 1.0);
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    fail(ErrorCode::dimension_mismatch, "dot shape mismatch");
  return kernels::dot(a.size(), a.data(), b.data());
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec operator+(Vec a, const Vec& b) {
  if (a.size() != b.size())
    fail(ErrorCode::dimension_mismatch, "vector add shape mismatch");
  kernels::axpy(a.size(), 1.0, b.data(), a.data());
  return a;
}

Vec operator-(Vec a, const Vec& b) {
  if (a.size() != b.size())
    fail(ErrorCode::dimension_mismatch, "vector sub shape mismatch");
  kernels::axpy(a.size(), -1.0, b.data(), a.data());
  return a;
}

Vec operator*(double a, Vec v) {
  kernels::scale(v.size(), a, v.data());
  return v;
}

}  // namespace lqot
