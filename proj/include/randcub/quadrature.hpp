#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "randcub/linalg.hpp"
#include "randcub/polynomial_family.hpp"

namespace randcub {

/// Gauss rule for a family's probability measure: sum_i weights[i] f(nodes[i])
/// approximates int f dmu_1, exact for polynomials of degree <= 2*points-1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal
/// recurrence matrix, weights the squared first components of its normalized
/// eigenvectors (times the measure's unit total mass).
inline GaussRule gauss_rule(const PolynomialFamily& family, int points) {
  if (points < 1 || points > 512)
    throw std::invalid_argument("gauss_rule: point count outside [1,512]");
  if (points > PolynomialFamily::kMaxDegree + 1)
    throw std::invalid_argument("gauss_rule: point count above supported degree range");
  const std::size_t n = static_cast<std::size_t>(points);
  Matrix j(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    j(k, k) = family.recurrence_b(static_cast<int>(k));
    if (k + 1 < n) {
      const double a = family.recurrence_a(static_cast<int>(k) + 1);
      j(k, k + 1) = a;
      j(k + 1, k) = a;
    }
  }
  Matrix vec;
  std::vector<double> eig = jacobi_eigenvalues(j, &vec);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return eig[a] < eig[b]; });

  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = eig[order[i]];
    const double v0 = vec(0, order[i]);
    rule.weights[i] = v0 * v0;
  }
  if (family.bounded())
    for (double& t : rule.nodes) t = std::clamp(t, -1.0, 1.0);
  return rule;
}

/// Shared 16-point Gauss-Legendre rule on [-1,1] for the uniform probability
/// measure (panel integration workhorse; multiply weights by the interval
/// length for a Lebesgue integral).
inline const GaussRule& panel_rule16() {
  static const GaussRule rule = gauss_rule(PolynomialFamily::legendre(), 16);
  return rule;
}

/// Integral of f over one interval [lo,hi] against Lebesgue measure, one
/// 16-point Gauss panel.
template <class F>
double panel_integral(double lo, double hi, F&& f) {
  const GaussRule& r = panel_rule16();
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * (hi - lo);
}

/// Tensorized Gauss reference integral of f against the product measure
/// mu = mu_1^{x d}.  Supported for d <= 3 (the reference-quadrature regime).
template <class F>
double tensor_integral(const PolynomialFamily& family, int dim, int points, F&& f) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("tensor_integral: dimension outside [1,3]");
  const GaussRule rule = gauss_rule(family, points);
  const std::size_t p = rule.nodes.size();
  std::vector<double> y(static_cast<std::size_t>(dim));
  double total = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    double w = 1.0;
    for (int q = 0; q < dim; ++q) {
      y[static_cast<std::size_t>(q)] = rule.nodes[idx[static_cast<std::size_t>(q)]];
      w *= rule.weights[idx[static_cast<std::size_t>(q)]];
    }
    total += w * f(std::span<const double>(y));
    int q = 0;
    for (; q < dim; ++q) {
      std::size_t& i = idx[static_cast<std::size_t>(q)];
      if (++i < p) break;
      i = 0;
    }
    if (q == dim) break;
  }
  return total;
}

}  // namespace randcub
