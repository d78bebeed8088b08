#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace randcub {

/// Minimal dense row-major matrix.  Everything in this project is small
/// (n <= 512 on the symmetric side), so no external linear algebra package
/// is pulled in.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline Matrix identity(std::size_t n) {
  Matrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace detail

/// Eigenvalues (and optionally eigenvectors as columns of V) of a symmetric
/// matrix by cyclic Jacobi rotations.  Sweeps continue until the off-diagonal
/// Frobenius mass is below 1e-14 times the matrix scale, well inside the
/// 1e-12 tolerance the callers rely on.  Supported size n <= 512.
inline std::vector<double> jacobi_eigenvalues(Matrix a, Matrix* vectors = nullptr) {
  const std::size_t n = a.rows;
  if (n != a.cols) throw std::invalid_argument("jacobi_eigenvalues: matrix not square");
  if (n > 512) throw std::invalid_argument("jacobi_eigenvalues: size above supported limit 512");
  if (vectors) *vectors = identity(n);

  double scale = 0.0;
  for (double v : a.data) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  const double tol = 1e-14 * scale * static_cast<double>(n);

  for (int sweep = 0; sweep < 64; ++sweep) {
    if (detail::off_diagonal_norm(a) <= tol) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        if (vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*vectors)(k, p), vkq = (*vectors)(k, q);
            (*vectors)(k, p) = c * vkp - s * vkq;
            (*vectors)(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  return eig;
}

/// Spectral norm (largest |eigenvalue|) of a symmetric matrix.
inline double symmetric_spectral_norm(const Matrix& a) {
  double mx = 0.0;
  for (double lam : jacobi_eigenvalues(a)) mx = std::max(mx, std::abs(lam));
  return mx;
}

/// Cholesky factorization G = L L^T for symmetric positive definite G.
/// Returns false if a pivot drops to <= pivot_tol (treated as numerical
/// breakdown by callers, never as a crash).
inline bool cholesky_factor(const Matrix& g, Matrix& l, double pivot_tol = 1e-14) {
  const std::size_t n = g.rows;
  if (n != g.cols) throw std::invalid_argument("cholesky_factor: matrix not square");
  l = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = g(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_tol)) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return true;
}

/// Solve G x = rhs through an existing Cholesky factor L.
inline std::vector<double> cholesky_solve_factored(const Matrix& l,
                                                   const std::vector<double>& rhs) {
  const std::size_t n = l.rows;
  if (rhs.size() != n) throw std::invalid_argument("cholesky_solve_factored: size mismatch");
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

/// One-shot SPD solve.  Returns false on factorization breakdown.
inline bool cholesky_solve(const Matrix& g, const std::vector<double>& rhs,
                           std::vector<double>& x, double pivot_tol = 1e-14) {
  Matrix l;
  if (!cholesky_factor(g, l, pivot_tol)) return false;
  x = cholesky_solve_factored(l, rhs);
  return true;
}

}  // namespace randcub
