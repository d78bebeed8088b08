#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace randcub {

enum class FamilyKind { legendre, chebyshev, hermite, jacobi };

/// Univariate polynomial family, orthonormal with respect to a probability
/// measure mu_1:
///
///   legendre   uniform density 1/2 on [-1,1]
///   chebyshev  arcsine density 1/(pi sqrt(1-t^2)) on [-1,1]
///   hermite    standard Gaussian on R
///   jacobi     c (1-t)^theta1 (1+t)^theta2 on [-1,1], integer theta >= 0
///
/// Values come from the orthonormal three-term recurrence
///   t phi_k = a_{k+1} phi_{k+1} + b_k phi_k + a_k phi_{k-1},
/// whose coefficients are precomputed at construction from the classical
/// (Gautschi-form) monic recurrence of the weight; probability
/// normalization makes phi_0 == 1 exactly.  Forward evaluation is stable
/// for every supported degree (max 200).
class PolynomialFamily {
 public:
  static constexpr int kMaxDegree = 200;

  static PolynomialFamily legendre() { return PolynomialFamily(FamilyKind::legendre, 0.0, 0.0); }
  static PolynomialFamily chebyshev() { return PolynomialFamily(FamilyKind::chebyshev, -0.5, -0.5); }
  static PolynomialFamily hermite() {
    return PolynomialFamily(FamilyKind::hermite, std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN());
  }
  static PolynomialFamily jacobi(int theta1, int theta2) {
    if (theta1 < 0 || theta2 < 0)
      throw std::invalid_argument("PolynomialFamily::jacobi: parameters must be >= 0");
    return PolynomialFamily(FamilyKind::jacobi, theta1, theta2);
  }

  FamilyKind kind() const { return kind_; }
  bool bounded() const { return kind_ != FamilyKind::hermite; }

  /// Jacobi exponents of the weight; NaN for the Gaussian family.
  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  bool has_jacobi_exponents() const { return kind_ != FamilyKind::hermite; }

  std::string name() const {
    switch (kind_) {
      case FamilyKind::legendre: return "legendre";
      case FamilyKind::chebyshev: return "chebyshev";
      case FamilyKind::hermite: return "hermite";
      case FamilyKind::jacobi: return "jacobi";
    }
    return "?";
  }

  /// Probability density of mu_1 at t (inside the domain).
  double density(double t) const {
    switch (kind_) {
      case FamilyKind::legendre: return 0.5;
      case FamilyKind::chebyshev: {
        const double s = 1.0 - t * t;
        if (s <= 0.0) return std::numeric_limits<double>::infinity();
        return 1.0 / (M_PI * std::sqrt(s));
      }
      case FamilyKind::hermite:
        return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
      case FamilyKind::jacobi:
        return norm_const_ * std::pow(1.0 - t, theta1_) * std::pow(1.0 + t, theta2_);
    }
    return 0.0;
  }

  /// Recurrence coefficients of the orthonormal form; a(k) valid for
  /// k >= 1, b(k) for k >= 0.
  double recurrence_a(int k) const { return a_[static_cast<std::size_t>(k)]; }
  double recurrence_b(int k) const { return b_[static_cast<std::size_t>(k)]; }

  /// phi_0(t), ..., phi_k(t) in one recurrence pass; out must hold k+1 values.
  void eval_all(int k, double t, std::span<double> out) const {
    check_degree(k);
    check_domain(t);
    out[0] = 1.0;
    if (k == 0) return;
    out[1] = (t - b_[0]) / a_[1];
    for (int j = 1; j < k; ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      out[sj + 1] = ((t - b_[sj]) * out[sj] - a_[sj] * out[sj - 1]) / a_[sj + 1];
    }
  }

  /// Single value phi_k(t) with rolling scalars (no temporary storage).
  double eval(int k, double t) const {
    check_degree(k);
    check_domain(t);
    double prev = 0.0, cur = 1.0;
    for (int j = 0; j < k; ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      const double next = ((t - b_[sj]) * cur - a_[sj] * prev) / a_[sj + 1];
      prev = cur;
      cur = next;
    }
    return cur;
  }

 private:
  PolynomialFamily(FamilyKind kind, double th1, double th2)
      : kind_(kind), theta1_(th1), theta2_(th2) {
    build_recurrence();
  }

  void check_degree(int k) const {
    if (k < 0 || k > kMaxDegree)
      throw std::invalid_argument("PolynomialFamily: degree outside [0," +
                                  std::to_string(kMaxDegree) + "]");
  }

  void check_domain(double t) const {
    if (!std::isfinite(t)) throw std::domain_error("PolynomialFamily: non-finite argument");
    if (bounded() && (t < -1.0 || t > 1.0))
      throw std::domain_error("PolynomialFamily: argument outside [-1,1]");
  }

  void build_recurrence() {
    const std::size_t len = kMaxDegree + 2;
    a_.assign(len, 0.0);
    b_.assign(len, 0.0);
    if (kind_ == FamilyKind::hermite) {
      for (std::size_t k = 1; k < len; ++k) a_[k] = std::sqrt(static_cast<double>(k));
      return;
    }
    // Jacobi-type weight (1-t)^al (1+t)^be; legendre is (0,0), chebyshev
    // (-1/2,-1/2).  Monic recurrence centers alpha_k and norms beta_k, with
    // beta_0 folded away by the probability normalization; orthonormal
    // off-diagonal entries are a_k = sqrt(beta_k).
    const double al = theta1_, be = theta2_;
    b_[0] = (be - al) / (al + be + 2.0);
    for (std::size_t k = 1; k < len; ++k) {
      const double kk = static_cast<double>(k);
      const double s = 2.0 * kk + al + be;
      b_[k] = (be * be - al * al) / (s * (s + 2.0));
      double beta_k;
      if (k == 1)
        beta_k = 4.0 * (1.0 + al) * (1.0 + be) /
                 ((2.0 + al + be) * (2.0 + al + be) * (3.0 + al + be));
      else
        beta_k = 4.0 * kk * (kk + al) * (kk + be) * (kk + al + be) /
                 (s * s * (s + 1.0) * (s - 1.0));
      a_[k] = std::sqrt(beta_k);
    }
    if (kind_ == FamilyKind::jacobi) {
      // ln of 2^(al+be+1) B(al+1, be+1), the weight's total mass.
      const double logmass = (al + be + 1.0) * std::log(2.0) + std::lgamma(al + 1.0) +
                             std::lgamma(be + 1.0) - std::lgamma(al + be + 2.0);
      norm_const_ = std::exp(-logmass);
    }
  }

  FamilyKind kind_;
  double theta1_, theta2_;
  double norm_const_ = 1.0;
  std::vector<double> a_, b_;
};

}  // namespace randcub
