#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "randcub/multi_index.hpp"
#include "randcub/polynomial_family.hpp"

namespace randcub {

/// Tensorized orthonormal basis psi_nu(y) = prod_q phi_{nu_q}(y_q) over a
/// MultiIndexSet Lambda, together with the Christoffel-type weight
///   w(y) = n / sum_{nu in Lambda} psi_nu(y)^2,
/// which satisfies 0 < w <= n because the first basis function is constant 1.
class TensorBasis {
 public:
  TensorBasis(PolynomialFamily family, MultiIndexSet set)
      : family_(std::move(family)), set_(std::move(set)) {
    if (set_.max_degree() > PolynomialFamily::kMaxDegree)
      throw std::invalid_argument("TensorBasis: index set degree above supported maximum");
  }

  const PolynomialFamily& family() const { return family_; }
  const MultiIndexSet& index_set() const { return set_; }
  int dim() const { return set_.dim(); }
  std::size_t size() const { return set_.size(); }

  /// All n basis values at y, in index-set order; out.size() must be n.
  void eval_into(std::span<const double> y, std::span<double> out) const {
    if (y.size() != static_cast<std::size_t>(dim()))
      throw std::invalid_argument("TensorBasis::eval_into: point dimension mismatch");
    if (out.size() != size())
      throw std::invalid_argument("TensorBasis::eval_into: output size mismatch");
    const int kmax = set_.max_degree();
    const std::size_t stride = static_cast<std::size_t>(kmax) + 1;
    std::vector<double> uni(static_cast<std::size_t>(dim()) * stride);
    for (int q = 0; q < dim(); ++q)
      family_.eval_all(kmax, y[static_cast<std::size_t>(q)],
                       std::span<double>(uni.data() + static_cast<std::size_t>(q) * stride, stride));
    for (std::size_t j = 0; j < size(); ++j) {
      const MultiIndex& nu = set_[j];
      double p = 1.0;
      for (int q = 0; q < dim(); ++q)
        p *= uni[static_cast<std::size_t>(q) * stride + static_cast<std::size_t>(nu[static_cast<std::size_t>(q)])];
      out[j] = p;
    }
  }

  std::vector<double> eval(std::span<const double> y) const {
    std::vector<double> out(size());
    eval_into(y, out);
    return out;
  }

  /// sum_j psi_j(y)^2 (inverse Christoffel function times n).
  double sum_of_squares(std::span<const double> y) const {
    std::vector<double> v = eval(y);
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  }

  double kappa(std::span<const double> y) const { return 1.0 / sum_of_squares(y); }

  /// w(y) = n * kappa(y), in (0, n].
  double weight(std::span<const double> y) const {
    return static_cast<double>(size()) / sum_of_squares(y);
  }

 private:
  PolynomialFamily family_;
  MultiIndexSet set_;
};

/// Exponent B(theta1, theta2) governing the sup-norm inverse inequality
/// ||v||_inf <= n^B ||v||_{L2(mu)} on downward-closed spaces: max(theta)+1
/// for nonnegative integer Jacobi exponents, ln 3 / (2 ln 2) for the
/// arcsine (Chebyshev) pair.
inline double inverse_inequality_exponent(double theta1, double theta2) {
  if (theta1 == -0.5 && theta2 == -0.5) return std::log(3.0) / (2.0 * std::log(2.0));
  const bool integer_pair = theta1 >= 0.0 && theta2 >= 0.0 &&
                            theta1 == std::floor(theta1) && theta2 == std::floor(theta2);
  if (!integer_pair)
    throw std::invalid_argument(
        "inverse_inequality_exponent: parameters must be nonnegative integers or (-1/2,-1/2)");
  return std::max(theta1, theta2) + 1.0;
}

inline double inverse_inequality_exponent(const PolynomialFamily& family) {
  if (!family.has_jacobi_exponents())
    throw std::invalid_argument(
        "inverse_inequality_exponent: unavailable for the Gaussian family");
  return inverse_inequality_exponent(family.theta1(), family.theta2());
}

/// Analytic lower bound w(y) >= n^(1-2B) valid on downward-closed sets for
/// Jacobi-type families.
inline double w_min_analytic_bound(const TensorBasis& basis) {
  if (!basis.family().has_jacobi_exponents())
    throw std::invalid_argument("w_min_analytic_bound: unavailable for the Gaussian family");
  if (!is_downward_closed(basis.index_set()))
    throw std::invalid_argument("w_min_analytic_bound: index set must be downward closed");
  const double b = inverse_inequality_exponent(basis.family());
  return std::pow(static_cast<double>(basis.size()), 1.0 - 2.0 * b);
}

namespace detail {

/// Golden-section maximization of a scalar function on [lo,hi].
template <class F>
double golden_max(double lo, double hi, F&& f) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 90 && (b - a) > 1e-14; ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b), fm = f(xm);
  if (fm >= f1 && fm >= f2) return xm;
  return f1 > f2 ? x1 : x2;
}

}  // namespace detail

/// Numeric minimum of w over the domain: scan of a Chebyshev-distributed
/// tensor grid (endpoints included) followed by one coordinate-wise local
/// refinement pass around the best point.  Grid resolution is 2048 points
/// per coordinate for d <= 2 and 161 for d = 3 to keep the tensor scan at
/// a comparable evaluation budget.  The Gaussian family has inf w = 0 over
/// its unbounded domain and reports exactly 0.
inline double w_min_numeric(const TensorBasis& basis) {
  if (!basis.family().bounded()) return 0.0;
  const int d = basis.dim();
  if (d > 3) throw std::invalid_argument("w_min_numeric: supported for d <= 3 only");
  const int npts = d <= 2 ? 2048 : 161;

  std::vector<double> grid(static_cast<std::size_t>(npts));
  for (int i = 0; i < npts; ++i)
    grid[static_cast<std::size_t>(i)] = std::cos(M_PI * static_cast<double>(i) / (npts - 1));

  // Univariate values cached per grid point: psi sums become n*d products.
  const int kmax = basis.index_set().max_degree();
  const std::size_t stride = static_cast<std::size_t>(kmax) + 1;
  std::vector<double> table(static_cast<std::size_t>(npts) * stride);
  for (int i = 0; i < npts; ++i)
    basis.family().eval_all(kmax, grid[static_cast<std::size_t>(i)],
                            std::span<double>(table.data() + static_cast<std::size_t>(i) * stride, stride));

  const auto& indices = basis.index_set().indices();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<int> best_idx = idx;
  double best_sum = -1.0;
  while (true) {
    double s = 0.0;
    for (const MultiIndex& nu : indices) {
      double p = 1.0;
      for (int q = 0; q < d; ++q)
        p *= table[static_cast<std::size_t>(idx[static_cast<std::size_t>(q)]) * stride +
                   static_cast<std::size_t>(nu[static_cast<std::size_t>(q)])];
      s += p * p;
    }
    if (s > best_sum) {
      best_sum = s;
      best_idx = idx;
    }
    int q = 0;
    for (; q < d; ++q) {
      int& i = idx[static_cast<std::size_t>(q)];
      if (++i < npts) break;
      i = 0;
    }
    if (q == d) break;
  }

  // One refinement sweep: maximize the squared-sum coordinate by coordinate
  // inside the bracket formed by the neighboring grid points.
  std::vector<double> y(static_cast<std::size_t>(d));
  for (int q = 0; q < d; ++q)
    y[static_cast<std::size_t>(q)] = grid[static_cast<std::size_t>(best_idx[static_cast<std::size_t>(q)])];
  for (int q = 0; q < d; ++q) {
    const int i = best_idx[static_cast<std::size_t>(q)];
    const double lo = grid[static_cast<std::size_t>(std::min(i + 1, npts - 1))];
    const double hi = grid[static_cast<std::size_t>(std::max(i - 1, 0))];
    const double t = detail::golden_max(lo, hi, [&](double tq) {
      y[static_cast<std::size_t>(q)] = tq;
      return basis.sum_of_squares(y);
    });
    y[static_cast<std::size_t>(q)] = t;
    best_sum = std::max(best_sum, basis.sum_of_squares(y));
  }
  return static_cast<double>(basis.size()) / best_sum;
}

}  // namespace randcub
