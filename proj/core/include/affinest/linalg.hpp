#ifndef AFFINEST_LINALG_HPP
#define AFFINEST_LINALG_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "affinest/errors.hpp"

// Minimal dense linear algebra for small dimensions (p <= ~10): vectors,
// row-major matrices, and an SPD Cholesky factorization with determinant.

namespace affinest {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double value = 0.0) : e_(dim, value) {}
  Vector(std::initializer_list<double> init) : e_(init) {}
  explicit Vector(std::vector<double> values) : e_(std::move(values)) {}

  std::size_t dim() const noexcept { return e_.size(); }
  double operator[](std::size_t i) const { return e_[i]; }
  double& operator[](std::size_t i) { return e_[i]; }

  std::span<const double> span() const noexcept { return e_; }
  const std::vector<double>& entries() const noexcept { return e_; }

  auto begin() const noexcept { return e_.begin(); }
  auto end() const noexcept { return e_.end(); }

  bool all_finite() const noexcept;
  double inf_norm() const noexcept;   // max |e_i|
  double two_norm() const noexcept;

  Vector& operator+=(const Vector& rhs);
  Vector& operator-=(const Vector& rhs);
  Vector& operator*=(double s) noexcept;

 private:
  std::vector<double> e_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator*(double s, Vector v);
double dot(const Vector& a, const Vector& b);

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), e_(rows * cols, value) {}

  static Matrix identity(std::size_t dim);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(e_).subspan(r * cols_, cols_);
  }
  std::span<const double> span() const noexcept { return e_; }

  bool all_finite() const noexcept;
  double trace() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> e_;
};

Vector matvec(const Matrix& m, const Vector& v);

/// Lower-triangular Cholesky factor L of an SPD matrix M = L L^T, together
/// with log|M|.  Immutable once built.
class SpdFactorization {
 public:
  std::size_t dim() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }
  double log_det() const noexcept { return log_det_; }

 private:
  SpdFactorization(Matrix lower, double log_det)
      : lower_(std::move(lower)), log_det_(log_det) {}
  Matrix lower_;
  double log_det_;

  friend SpdFactorization spd_factorize(const Matrix& m);
};

/// Cholesky-factorize a symmetric positive definite matrix.
///
/// Symmetry is required up to 1e-9 * max|entry|.  A pivot falling at or below
/// 1e-12 * trace/dim signals a degenerate matrix and raises
/// NotPositiveDefinite.
SpdFactorization spd_factorize(const Matrix& m);

/// v^T M^{-1} v for the factorized M.  Evaluated as ||L^{-1} v||^2, so the
/// result is nonnegative by construction.
double quad_form(const SpdFactorization& f, const Vector& v);

/// M^{-1} v via forward and back substitution.
Vector solve(const SpdFactorization& f, const Vector& v);

}  // namespace affinest

#endif  // AFFINEST_LINALG_HPP
