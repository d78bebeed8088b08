#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "randcub/cubature.hpp"
#include "randcub/tensor_basis.hpp"

namespace randcub {

struct IntegrandParams {
  double c = 1.0;                    // runge scale parameter
  std::vector<double> coefficients;  // polynomial-in-span coefficients
};

/// Registry of test integrands.  Names:
///   product_exponential  exp(sum_q y_q)
///   runge                1 / (1 + c |y|^2)
///   polynomial           sum_j coefficients[j] psi_j(y)  (exercises exactness)
///   cosine_product       prod_q cos(pi y_q / 2)
inline Integrand make_integrand(const std::string& name, const IntegrandParams& params,
                                const TensorBasis& basis) {
  if (name == "product_exponential") {
    return [](std::span<const double> y) {
      double s = 0.0;
      for (double v : y) s += v;
      return std::exp(s);
    };
  }
  if (name == "runge") {
    const double c = params.c;
    if (!(c > 0.0)) throw std::invalid_argument("runge integrand: c must be positive");
    return [c](std::span<const double> y) {
      double s = 0.0;
      for (double v : y) s += v * v;
      return 1.0 / (1.0 + c * s);
    };
  }
  if (name == "polynomial") {
    if (params.coefficients.size() != basis.size())
      throw std::invalid_argument(
          "polynomial integrand: coefficient count must equal the basis size");
    return [basis, coeffs = params.coefficients](std::span<const double> y) {
      const std::vector<double> psi = basis.eval(y);
      return std::inner_product(coeffs.begin(), coeffs.end(), psi.begin(), 0.0);
    };
  }
  if (name == "cosine_product") {
    return [](std::span<const double> y) {
      double p = 1.0;
      for (double v : y) p *= std::cos(0.5 * M_PI * v);
      return p;
    };
  }
  throw std::invalid_argument("unknown integrand: " + name);
}

}  // namespace randcub
