#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "randcub/linalg.hpp"
#include "randcub/sampling.hpp"
#include "randcub/tensor_basis.hpp"

namespace randcub {

/// Weighted design assembled at a node sample:
///   D_ij = sqrt(w(y_i)) psi_j(y_i),   G = (1/m) D^T D,
///   rhs_i = sqrt(w(y_i)) phi(y_i)     (only when evaluations are supplied).
struct DesignSystem {
  Matrix d_matrix;          // m x n
  Matrix gram;              // n x n
  std::vector<double> rhs;  // length m, empty when no evaluations given
  std::size_t m = 0;
  std::size_t n = 0;
};

namespace detail {

inline DesignSystem assemble_design(const TensorBasis& basis, const NodeSample& sample,
                                    const double* evaluations) {
  if (sample.dim != basis.dim())
    throw std::invalid_argument("build_design: sample dimension mismatch");
  if (sample.m == 0) throw std::invalid_argument("build_design: empty sample");
  if (sample.w_values.size() != sample.m)
    throw std::invalid_argument("build_design: weight values missing");

  DesignSystem sys;
  sys.m = sample.m;
  sys.n = basis.size();
  sys.d_matrix = Matrix(sys.m, sys.n);
  sys.gram = Matrix(sys.n, sys.n);
  if (evaluations) sys.rhs.resize(sys.m);

  std::vector<double> psi(sys.n);
  for (std::size_t i = 0; i < sys.m; ++i) {
    const double w = sample.w_values[i];
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("build_design: nonpositive or non-finite weight value");
    const double sw = std::sqrt(w);
    basis.eval_into(sample.node(i), psi);
    for (std::size_t j = 0; j < sys.n; ++j) sys.d_matrix(i, j) = sw * psi[j];
    if (evaluations) {
      if (!std::isfinite(evaluations[i]))
        throw std::invalid_argument("build_design: non-finite integrand evaluation");
      sys.rhs[i] = sw * evaluations[i];
    }
    for (std::size_t j = 0; j < sys.n; ++j) {
      const double dij = sys.d_matrix(i, j);
      for (std::size_t k = j; k < sys.n; ++k) sys.gram(j, k) += dij * sys.d_matrix(i, k);
    }
  }
  const double inv_m = 1.0 / static_cast<double>(sys.m);
  for (std::size_t j = 0; j < sys.n; ++j)
    for (std::size_t k = j; k < sys.n; ++k) {
      sys.gram(j, k) *= inv_m;
      sys.gram(k, j) = sys.gram(j, k);
    }
  return sys;
}

}  // namespace detail

inline DesignSystem build_design(const TensorBasis& basis, const NodeSample& sample) {
  return detail::assemble_design(basis, sample, nullptr);
}

inline DesignSystem build_design(const TensorBasis& basis, const NodeSample& sample,
                                 std::span<const double> evaluations) {
  if (evaluations.size() != sample.m)
    throw std::invalid_argument("build_design: evaluation count differs from sample size");
  return detail::assemble_design(basis, sample, evaluations.data());
}

/// Spectral norm of G - I, the concentration diagnostic everything is
/// conditioned on.
inline double gram_deviation(const Matrix& gram) {
  Matrix a = gram;
  for (std::size_t i = 0; i < a.rows; ++i) a(i, i) -= 1.0;
  return symmetric_spectral_norm(a);
}

inline double gram_deviation(const DesignSystem& sys) { return gram_deviation(sys.gram); }

struct LeastSquaresFit {
  std::vector<double> beta;       // n coefficients; all zero on the bad event
  double gram_deviation = 0.0;
  bool good_event = false;        // strict: deviation < delta and solve succeeded
  double delta = 0.0;
  bool factorization_failed = false;
};

/// Conditioned weighted least-squares fit: solves the normal equations
/// G beta = (1/m) D^T rhs when the Gramian deviation is strictly below
/// delta, otherwise returns the zero fit.  Factorization breakdown (pivot
/// <= 1e-14) is reported as a bad event with the diagnostic flag set, never
/// as an exception.
inline LeastSquaresFit solve_fit(const DesignSystem& sys, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("solve_fit: delta must be positive");
  if (sys.rhs.size() != sys.m)
    throw std::invalid_argument("solve_fit: design has no right-hand side");
  LeastSquaresFit fit;
  fit.delta = delta;
  fit.gram_deviation = gram_deviation(sys);
  fit.beta.assign(sys.n, 0.0);
  if (!(fit.gram_deviation < delta)) return fit;

  std::vector<double> rhs_n(sys.n, 0.0);
  for (std::size_t i = 0; i < sys.m; ++i)
    for (std::size_t j = 0; j < sys.n; ++j) rhs_n[j] += sys.d_matrix(i, j) * sys.rhs[i];
  const double inv_m = 1.0 / static_cast<double>(sys.m);
  for (double& v : rhs_n) v *= inv_m;

  std::vector<double> beta;
  if (!cholesky_solve(sys.gram, rhs_n, beta)) {
    fit.factorization_failed = true;
    return fit;
  }
  fit.beta = std::move(beta);
  fit.good_event = true;
  return fit;
}

/// Checks the empirical/true norm equivalence
///   (1-delta) ||v||^2 <= v^T G v <= (1+delta) ||v||^2
/// for a coefficient vector v (a tiny relative slack absorbs rounding, so
/// the delta = 0, G = I case passes with equality).
inline bool norm_equivalence_check(const DesignSystem& sys, double delta,
                                   std::span<const double> coeffs) {
  if (coeffs.size() != sys.n)
    throw std::invalid_argument("norm_equivalence_check: coefficient size mismatch");
  double true_sq = 0.0;
  for (double v : coeffs) true_sq += v * v;
  double emp_sq = 0.0;
  for (std::size_t j = 0; j < sys.n; ++j) {
    double gv = 0.0;
    for (std::size_t k = 0; k < sys.n; ++k) gv += sys.gram(j, k) * coeffs[k];
    emp_sq += coeffs[j] * gv;
  }
  const double slack = 1e-12 * std::max(1.0, true_sq);
  return emp_sq >= (1.0 - delta) * true_sq - slack &&
         emp_sq <= (1.0 + delta) * true_sq + slack;
}

}  // namespace randcub
