#pragma once
// Dense row-major matrix over double. Construction from external data
// validates that every entry is finite; arithmetic assumes valid inputs.

#include <cstddef>
#include <vector>

#include "lqot/error.hpp"

namespace lqot {

using Vec = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows);
  static Matrix diag(const Vec& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  Matrix transpose() const;
  Matrix block(std::size_t i0, std::size_t j0, std::size_t r,
               std::size_t c) const;
  void set_block(std::size_t i0, std::size_t j0, const Matrix& b);

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double a);

  Vec apply(const Vec& x) const;            // A x
  Vec apply_transposed(const Vec& x) const; // A^T x

  double frobenius_norm() const;
  double one_norm() const;  // max column abs sum
  double inf_norm() const;  // max row abs sum
  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double a, Matrix m);
Matrix operator*(Matrix m, double a);
Matrix operator-(Matrix m);

double sym_residual(const Matrix& m);  // ||M - M^T||_max / max(1, ||M||_max)

// Vector helpers (kernel-backed where it matters).
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double a, Vec v);

}  // namespace lqot
