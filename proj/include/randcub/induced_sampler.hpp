#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "randcub/polynomial_family.hpp"
#include "randcub/quadrature.hpp"

namespace randcub {

/// Sampler for the univariate induced density phi_k(t)^2 dmu_1(t) (a
/// probability density by orthonormality; k = 0 gives the base measure
/// itself).
///
/// The CDF is tabulated once on 4096 uniform panels with a 16-point Gauss
/// panel rule; draws invert it by bisection on the knot table plus
/// safeguarded Newton refinement down to |CDF(t) - u| <= 1e-12.  For the
/// arcsine weight the panel masses are integrated in the arccos variable,
/// which removes the endpoint singularity; for the Gaussian family the
/// domain is truncated to [-T, T] with T = sqrt(2k+1) + 12 (tail mass below
/// 1e-16, renormalized away).  The object is immutable after construction.
class UnivariateInducedSampler {
 public:
  static constexpr int kPanels = 4096;

  UnivariateInducedSampler(PolynomialFamily family, int degree)
      : family_(std::move(family)), k_(degree) {
    if (degree < 0 || degree > PolynomialFamily::kMaxDegree)
      throw std::invalid_argument("UnivariateInducedSampler: degree out of range");
    if (family_.bounded()) {
      lo_ = -1.0;
      hi_ = 1.0;
    } else {
      const double t = std::sqrt(2.0 * degree + 1.0) + 12.0;
      lo_ = -t;
      hi_ = t;
    }
    tabulate();
  }

  int degree() const { return k_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  const PolynomialFamily& family() const { return family_; }

  /// Induced probability density at t.
  double density(double t) const {
    const double v = family_.eval(k_, t);
    return v * v * family_.density(t);
  }

  /// Tabulated CDF at t (clamped to the tabulation domain).
  double cdf(double t) const {
    if (t <= lo_) return 0.0;
    if (t >= hi_) return 1.0;
    const std::size_t p = panel_of(t);
    return cdf_[p] + mass(knots_[p], t) / total_;
  }

  /// Inverse CDF draw from u in [0,1).
  double sample(double u) const {
    if (!(u >= 0.0 && u < 1.0))
      throw std::invalid_argument("UnivariateInducedSampler::sample: u outside [0,1)");
    const std::size_t p = static_cast<std::size_t>(
        std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin() - 1);
    double a = knots_[p], b = knots_[p + 1];
    const double span_mass = cdf_[p + 1] - cdf_[p];
    if (!(span_mass > 0.0)) return a;
    double t = a + (b - a) * (u - cdf_[p]) / span_mass;
    for (int it = 0; it < 80; ++it) {
      const double f = cdf_[p] + mass(knots_[p], t) / total_ - u;
      if (std::abs(f) <= 1e-12) break;
      if (f < 0.0) a = t; else b = t;
      const double dens = density(t) / total_;
      double next = (std::isfinite(dens) && dens > 0.0) ? t - f / dens : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      t = next;
      if (b - a <= 1e-15 * (std::abs(a) + std::abs(b) + 1.0)) break;
    }
    return std::clamp(t, lo_, hi_);
  }

 private:
  std::size_t panel_of(double t) const {
    const double h = (hi_ - lo_) / kPanels;
    auto p = static_cast<long>((t - lo_) / h);
    p = std::max(0l, std::min<long>(p, kPanels - 1));
    // Knot rounding can put t just outside the computed panel.
    while (p > 0 && t < knots_[static_cast<std::size_t>(p)]) --p;
    while (p + 1 < kPanels && t > knots_[static_cast<std::size_t>(p) + 1]) ++p;
    return static_cast<std::size_t>(p);
  }

  /// Integral of the (unnormalized) induced density over [a,b].
  double mass(double a, double b) const {
    if (b <= a) return 0.0;
    if (family_.kind() == FamilyKind::chebyshev) {
      // t = cos(theta) turns the arcsine weight into dtheta/pi.
      const double th_lo = std::acos(std::clamp(b, -1.0, 1.0));
      const double th_hi = std::acos(std::clamp(a, -1.0, 1.0));
      return panel_integral(th_lo, th_hi, [&](double th) {
        const double v = family_.eval(k_, std::cos(th));
        return v * v / M_PI;
      });
    }
    return panel_integral(a, b, [&](double t) { return density(t); });
  }

  void tabulate() {
    knots_.resize(kPanels + 1);
    cdf_.resize(kPanels + 1);
    for (int p = 0; p <= kPanels; ++p)
      knots_[static_cast<std::size_t>(p)] =
          lo_ + (hi_ - lo_) * static_cast<double>(p) / kPanels;
    knots_.front() = lo_;
    knots_.back() = hi_;
    cdf_[0] = 0.0;
    for (int p = 0; p < kPanels; ++p) {
      double dm = mass(knots_[static_cast<std::size_t>(p)], knots_[static_cast<std::size_t>(p) + 1]);
      if (dm < -1e-12)
        throw std::runtime_error("UnivariateInducedSampler: negative panel mass");
      if (dm < 0.0) dm = 0.0;
      cdf_[static_cast<std::size_t>(p) + 1] = cdf_[static_cast<std::size_t>(p)] + dm;
    }
    total_ = cdf_.back();
    if (!(total_ > 0.0) || std::abs(total_ - 1.0) > 1e-8)
      throw std::runtime_error("UnivariateInducedSampler: tabulated mass far from 1");
    for (double& c : cdf_) c /= total_;
    cdf_.front() = 0.0;
    cdf_.back() = 1.0;
  }

  PolynomialFamily family_;
  int k_;
  double lo_ = -1.0, hi_ = 1.0;
  double total_ = 1.0;
  std::vector<double> knots_;
  std::vector<double> cdf_;
};

}  // namespace randcub
