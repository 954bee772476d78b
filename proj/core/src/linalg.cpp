#include "affinest/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

namespace affinest {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw DimensionMismatch(std::string(where) + ": dimension mismatch (" +
                            std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

bool Vector::all_finite() const noexcept {
  for (double x : e_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double Vector::inf_norm() const noexcept {
  double m = 0.0;
  for (double x : e_) m = std::max(m, std::fabs(x));
  return m;
}

double Vector::two_norm() const noexcept {
  double s = 0.0;
  for (double x : e_) s += x * x;
  return std::sqrt(s);
}

Vector& Vector::operator+=(const Vector& rhs) {
  require_same_dim(dim(), rhs.dim(), "Vector::operator+=");
  for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += rhs.e_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& rhs) {
  require_same_dim(dim(), rhs.dim(), "Vector::operator-=");
  for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= rhs.e_[i];
  return *this;
}

Vector& Vector::operator*=(double s) noexcept {
  for (double& x : e_) x *= s;
  return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator*(double s, Vector v) { return v *= s; }

double dot(const Vector& a, const Vector& b) {
  require_same_dim(a.dim(), b.dim(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  for (double x : e_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double Matrix::trace() const {
  if (rows_ != cols_) throw DimensionMismatch("Matrix::trace: matrix not square");
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

Vector matvec(const Matrix& m, const Vector& v) {
  require_same_dim(m.cols(), v.dim(), "matvec");
  Vector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

SpdFactorization spd_factorize(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 0 || m.cols() != n) {
    throw DimensionMismatch("spd_factorize: matrix must be square and nonempty");
  }
  double max_abs = 0.0;
  for (double x : m.span()) {
    if (!std::isfinite(x)) throw NotPositiveDefinite("spd_factorize: non-finite entry");
    max_abs = std::max(max_abs, std::fabs(x));
  }
  const double sym_tol = 1e-9 * max_abs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(m(i, j) - m(j, i)) > sym_tol) {
        throw NotPositiveDefinite("spd_factorize: matrix not symmetric at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  // pivots at or below this threshold signal a degenerate matrix
  const double pivot_floor = 1e-12 * m.trace() / static_cast<double>(n);

  Matrix lower(n, n);
  double log_det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > pivot_floor)) {
      throw NotPositiveDefinite("spd_factorize: pivot " + std::to_string(d) +
                                " at column " + std::to_string(j) +
                                " below degeneracy threshold");
    }
    const double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    log_det += 2.0 * std::log(ljj);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  return SpdFactorization(std::move(lower), log_det);
}

namespace {

// y = L^{-1} v
void forward_solve(const Matrix& lower, const Vector& v, Vector& y) {
  const std::size_t n = lower.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = v[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
    y[i] = s / lower(i, i);
  }
}

// x = L^{-T} y
void backward_solve(const Matrix& lower, Vector& y) {
  const std::size_t n = lower.rows();
  for (std::size_t ip = n; ip-- > 0;) {
    double s = y[ip];
    for (std::size_t k = ip + 1; k < n; ++k) s -= lower(k, ip) * y[k];
    y[ip] = s / lower(ip, ip);
  }
}

}  // namespace

double quad_form(const SpdFactorization& f, const Vector& v) {
  require_same_dim(f.dim(), v.dim(), "quad_form");
  Vector y(f.dim());
  forward_solve(f.lower(), v, y);
  double s = 0.0;
  for (std::size_t i = 0; i < y.dim(); ++i) s += y[i] * y[i];
  return s;
}

Vector solve(const SpdFactorization& f, const Vector& v) {
  require_same_dim(f.dim(), v.dim(), "solve");
  Vector y(f.dim());
  forward_solve(f.lower(), v, y);
  backward_solve(f.lower(), y);
  return y;
}

}  // namespace affinest
