#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "randcub/least_squares.hpp"
#include "randcub/rng.hpp"
#include "randcub/sampling.hpp"
#include "randcub/tensor_basis.hpp"

namespace randcub {

inline constexpr double kDefaultDelta = 0.5;
inline constexpr double kDefaultR = 1.0;

/// Concentration rate function xi(delta) = (1+delta) ln(1+delta) - delta on
/// (0,1].  Satisfies 3(4 ln(4/3) - 1) delta^2 <= xi(delta) on (0,1/3] and
/// xi(delta) <= delta^2/2 on (0,1].
inline double xi(double delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("xi: delta must lie in (0,1]");
  return (1.0 + delta) * std::log1p(delta) - delta;
}

/// Error-amplification factor of the conditioned estimator,
/// epsilon(m) = 4 xi(delta) / ((1+r) ln m); decays to 0 as m grows.
inline double epsilon_m(std::size_t m, double r, double delta) {
  if (m < 3) throw std::invalid_argument("epsilon_m: m must be >= 3");
  if (!(r > 0.0)) throw std::invalid_argument("epsilon_m: r must be positive");
  return 4.0 * xi(delta) / ((1.0 + r) * std::log(static_cast<double>(m)));
}

/// Constant of the unconditioned moment bound:
///   sqrt(C(n)) (1 + sqrt(C(n)) sqrt(n/m)),  C(n) = 4 (1 + 2 ceil(ln n)).
inline double epsilon_mn(std::size_t m, std::size_t n) {
  if (m < 1 || n < 1) throw std::invalid_argument("epsilon_mn: m and n must be >= 1");
  const double c = 4.0 * (1.0 + 2.0 * std::ceil(std::log(static_cast<double>(n))));
  return std::sqrt(c) * (1.0 + std::sqrt(c) * std::sqrt(static_cast<double>(n) /
                                                        static_cast<double>(m)));
}

/// Cruder closed-form envelope (4 + 8 ceil(ln n)) (1 + sqrt(n/m)) dominating
/// epsilon_mn.
inline double epsilon_mn_bound(std::size_t m, std::size_t n) {
  if (m < 1 || n < 1) throw std::invalid_argument("epsilon_mn_bound: m and n must be >= 1");
  const double c = 4.0 + 8.0 * std::ceil(std::log(static_cast<double>(n)));
  return c * (1.0 + std::sqrt(static_cast<double>(n) / static_cast<double>(m)));
}

struct BudgetParams {
  std::size_t n = 1;
  double r = kDefaultR;
  double delta = kDefaultDelta;
};

namespace detail {

/// Smallest integer m >= 3 with m / ln m >= threshold (m / ln m is
/// increasing on m >= 3).
inline std::size_t smallest_m_over_log(double threshold) {
  const auto ratio = [](std::size_t m) {
    return static_cast<double>(m) / std::log(static_cast<double>(m));
  };
  if (ratio(3) >= threshold) return 3;
  std::size_t hi = 4;
  while (ratio(hi) < threshold) hi *= 2;
  std::size_t lo = hi / 2;
  while (lo + 1 < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (ratio(mid) >= threshold) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace detail

/// Smallest sample budget guaranteeing the good-event probability
/// 1 - 2 n m^{-(r+1)}:  m / ln m >= (1+r) n / xi(delta), with a floor of 3.
inline std::size_t min_samples(const BudgetParams& p) {
  if (p.n < 1) throw std::invalid_argument("min_samples: n must be >= 1");
  if (!(p.r > 0.0)) throw std::invalid_argument("min_samples: r must be positive");
  if (!(p.delta > 0.0 && p.delta < 1.0))
    throw std::invalid_argument("min_samples: delta must lie in (0,1)");
  return detail::smallest_m_over_log((1.0 + p.r) * static_cast<double>(p.n) / xi(p.delta));
}

/// Budget under which all cubature weights are positive (and sandwiched
/// around w(y_i)/m) with probability > 1 - 2 m^{-r}:
///   m / ln m >= 3 (1+r) n^2 / ((4 ln(4/3) - 1) w_min).
inline std::size_t min_samples_positive(const TensorBasis& basis, double r, double w_min) {
  if (!(r > 0.0)) throw std::invalid_argument("min_samples_positive: r must be positive");
  if (!(w_min > 0.0))
    throw std::invalid_argument(
        "min_samples_positive: w_min must be positive (unavailable on unbounded domains)");
  const double n = static_cast<double>(basis.size());
  const double c = 4.0 * std::log(4.0 / 3.0) - 1.0;
  return detail::smallest_m_over_log(3.0 * (1.0 + r) * n * n / (c * w_min));
}

inline std::size_t min_samples_positive(const TensorBasis& basis, double r) {
  return min_samples_positive(basis, r, w_min_numeric(basis));
}

/// Same budget with the analytic bound w_min >= n^(1-2B) substituted, giving
/// the family-level scaling m / ln m >= const * n^(2B+1).
inline std::size_t min_samples_positive_analytic(const PolynomialFamily& family,
                                                 std::size_t n, double r) {
  if (n < 1) throw std::invalid_argument("min_samples_positive_analytic: n must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("min_samples_positive_analytic: r must be positive");
  const double b = inverse_inequality_exponent(family);
  const double c = 4.0 * std::log(4.0 / 3.0) - 1.0;
  return detail::smallest_m_over_log(3.0 * (1.0 + r) *
                                     std::pow(static_cast<double>(n), 2.0 * b + 1.0) / c);
}

/// Randomized cubature rule: the sampled nodes plus one weight per node.
/// On the bad event (Gramian deviation >= delta, or factorization
/// breakdown) all weights are zero, which realizes the conditioned
/// estimator's zero fallback.
struct CubatureRule {
  NodeSample sample;
  std::vector<double> weights;
  bool good_event = false;
  double gram_deviation = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  bool factorization_failed = false;
};

/// Weights alpha_i = (1/m) sqrt(w(y_i)) (D h)_i with G h = e_1.  On the good
/// event they reproduce every basis integral exactly and sum to 1.
inline CubatureRule cubature_weights(const DesignSystem& sys, const NodeSample& sample,
                                     double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("cubature_weights: delta must be positive");
  if (sys.m != sample.m) throw std::invalid_argument("cubature_weights: sample/design mismatch");
  CubatureRule rule;
  rule.sample = sample;
  rule.delta = delta;
  rule.seed = sample.seed;
  rule.gram_deviation = gram_deviation(sys);
  rule.weights.assign(sys.m, 0.0);
  if (!(rule.gram_deviation < delta)) return rule;

  std::vector<double> e1(sys.n, 0.0);
  e1[0] = 1.0;
  std::vector<double> h;
  if (!cholesky_solve(sys.gram, e1, h)) {
    rule.factorization_failed = true;
    return rule;
  }
  const double inv_m = 1.0 / static_cast<double>(sys.m);
  for (std::size_t i = 0; i < sys.m; ++i) {
    double dh = 0.0;
    for (std::size_t j = 0; j < sys.n; ++j) dh += sys.d_matrix(i, j) * h[j];
    // d_matrix rows already carry sqrt(w), so alpha_i = (1/m) sqrt(w_i) (Dh)_i
    // needs one more sqrt(w_i): (sqrt(w) * Dh) = w * (Psi h).
    rule.weights[i] = inv_m * std::sqrt(sample.w_values[i]) * dh;
  }
  rule.good_event = true;
  return rule;
}

/// Plain weighted sum of the rule against integrand evaluations.
inline double apply_rule(const CubatureRule& rule, std::span<const double> evaluations) {
  if (evaluations.size() != rule.weights.size())
    throw std::invalid_argument("apply_rule: evaluation count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < rule.weights.size(); ++i) s += rule.weights[i] * evaluations[i];
  return s;
}

enum class EstimatorKind { ls, conditioned, control_variate, monte_carlo, importance_sampling };

inline std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::ls: return "ls";
    case EstimatorKind::conditioned: return "conditioned";
    case EstimatorKind::control_variate: return "control_variate";
    case EstimatorKind::monte_carlo: return "monte_carlo";
    case EstimatorKind::importance_sampling: return "importance_sampling";
  }
  return "?";
}

inline EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "ls") return EstimatorKind::ls;
  if (name == "conditioned") return EstimatorKind::conditioned;
  if (name == "control_variate") return EstimatorKind::control_variate;
  if (name == "monte_carlo") return EstimatorKind::monte_carlo;
  if (name == "importance_sampling") return EstimatorKind::importance_sampling;
  throw std::invalid_argument("unknown estimator: " + name);
}

struct EstimateRecord {
  EstimatorKind kind = EstimatorKind::conditioned;
  double value = 0.0;
  std::size_t m_used = 0;
  bool good_event = true;
  std::uint64_t seed = 0;
  double gram_deviation = std::numeric_limits<double>::quiet_NaN();
};

using Integrand = std::function<double(std::span<const double>)>;

namespace detail {

inline std::vector<double> evaluate_at(const Integrand& f, const NodeSample& sample) {
  std::vector<double> vals(sample.m);
  for (std::size_t i = 0; i < sample.m; ++i) vals[i] = f(sample.node(i));
  return vals;
}

}  // namespace detail

/// Stream convention shared by every estimator entry point: a call with seed
/// s draws its nodes from stream mix_seed(s, 0); the control variate
/// additionally uses mix_seed(s, 1) for its independent mu-sample.

/// Weighted least-squares cubature I_m(phi) = sum_i alpha_i phi(y_i).
inline EstimateRecord integrate_ls(const SigmaSampler& sampler, std::size_t m, double delta,
                                   std::uint64_t seed, const Integrand& f) {
  const NodeSample nodes = sampler.sample_sigma(m, mix_seed(seed, 0));
  const std::vector<double> evals = detail::evaluate_at(f, nodes);
  const DesignSystem sys = build_design(sampler.basis(), nodes, evals);
  const CubatureRule rule = cubature_weights(sys, nodes, delta);
  return EstimateRecord{EstimatorKind::ls, apply_rule(rule, evals), m,
                        rule.good_event, seed, rule.gram_deviation};
}

/// Conditioned estimator: I_m(phi) on the good event, exactly 0 otherwise.
inline EstimateRecord integrate_conditioned(const SigmaSampler& sampler, std::size_t m,
                                            double delta, std::uint64_t seed,
                                            const Integrand& f) {
  EstimateRecord rec = integrate_ls(sampler, m, delta, seed, f);
  rec.kind = EstimatorKind::conditioned;
  return rec;
}

/// Crude Monte Carlo baseline over the base measure mu.
inline EstimateRecord monte_carlo(const SigmaSampler& sampler, std::size_t m,
                                  std::uint64_t seed, const Integrand& f) {
  if (m < 1) throw std::invalid_argument("monte_carlo: m must be >= 1");
  const NodeSample nodes = sampler.sample_mu(m, mix_seed(seed, 0));
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += f(nodes.node(i));
  return EstimateRecord{EstimatorKind::monte_carlo, s / static_cast<double>(m), m,
                        true, seed, std::numeric_limits<double>::quiet_NaN()};
}

/// Importance-sampling baseline over sigma: (1/m) sum w(y_i) phi(y_i).
inline EstimateRecord importance_sampling(const SigmaSampler& sampler, std::size_t m,
                                          std::uint64_t seed, const Integrand& f) {
  if (m < 1) throw std::invalid_argument("importance_sampling: m must be >= 1");
  const NodeSample nodes = sampler.sample_sigma(m, mix_seed(seed, 0));
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += nodes.w_values[i] * f(nodes.node(i));
  return EstimateRecord{EstimatorKind::importance_sampling, s / static_cast<double>(m), m,
                        true, seed, std::numeric_limits<double>::quiet_NaN()};
}

/// Control-variate estimator at total budget 2m: conditioned fit on an
/// m-point sigma-sample plus a Monte Carlo correction over an independent
/// m-point mu-sample.  On the bad event the surrogate is zero and the value
/// degenerates to plain Monte Carlo over the mu-sample.
inline EstimateRecord integrate_control_variate(const SigmaSampler& sampler, std::size_t m,
                                                double delta, std::uint64_t seed,
                                                const Integrand& f) {
  const NodeSample nodes = sampler.sample_sigma(m, mix_seed(seed, 0));
  const std::vector<double> evals = detail::evaluate_at(f, nodes);
  const DesignSystem sys = build_design(sampler.basis(), nodes, evals);
  const LeastSquaresFit fit = solve_fit(sys, delta);

  const NodeSample tilde = sampler.sample_mu(m, mix_seed(seed, 1));
  double correction = 0.0;
  std::vector<double> psi(sampler.basis().size());
  for (std::size_t i = 0; i < m; ++i) {
    double surrogate = 0.0;
    if (fit.good_event) {
      sampler.basis().eval_into(tilde.node(i), psi);
      for (std::size_t j = 0; j < psi.size(); ++j) surrogate += fit.beta[j] * psi[j];
    }
    correction += f(tilde.node(i)) - surrogate;
  }
  correction /= static_cast<double>(m);
  const double surrogate_integral = fit.good_event ? fit.beta[0] : 0.0;
  return EstimateRecord{EstimatorKind::control_variate, surrogate_integral + correction,
                        2 * m, fit.good_event, seed, fit.gram_deviation};
}

/// Exact split of the good-event error I_m(phi) - I(phi) = S + B given the
/// projection residual h = phi - P_n phi evaluated at the nodes:
///   S = (1/m) sum_i w(y_i) h(y_i),
///   B = e_1^T (G^{-1} - I) (1/m) D^T W^{1/2} h.
struct ErrorSplit {
  double s_term = 0.0;
  double b_term = 0.0;
};

inline ErrorSplit error_split(const DesignSystem& sys, const NodeSample& sample,
                              std::span<const double> residual_evals) {
  if (residual_evals.size() != sys.m)
    throw std::invalid_argument("error_split: residual evaluation count mismatch");
  ErrorSplit out;
  const double inv_m = 1.0 / static_cast<double>(sys.m);
  std::vector<double> t(sys.n, 0.0);
  for (std::size_t i = 0; i < sys.m; ++i) {
    const double sw = std::sqrt(sample.w_values[i]);
    out.s_term += sample.w_values[i] * residual_evals[i];
    for (std::size_t j = 0; j < sys.n; ++j)
      t[j] += sys.d_matrix(i, j) * sw * residual_evals[i];
  }
  out.s_term *= inv_m;
  for (double& v : t) v *= inv_m;
  std::vector<double> z;
  if (!cholesky_solve(sys.gram, t, z))
    throw std::runtime_error("error_split: Gramian not positive definite");
  out.b_term = z[0] - t[0];
  return out;
}

struct SandwichReport {
  bool all_positive = false;
  bool sandwich = false;
};

/// Per-sample check of the weight sandwich
///   (2 w(y_i) - w_min) / (2m) <= alpha_i <= (2 w(y_i) + w_min) / (2m)
/// together with the weaker all-weights-positive flag.
inline SandwichReport weight_sandwich_check(const CubatureRule& rule, double w_min) {
  SandwichReport rep;
  const std::size_t m = rule.weights.size();
  if (m == 0) return rep;
  rep.all_positive = true;
  rep.sandwich = true;
  const double inv_2m = 0.5 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = rule.weights[i];
    const double w = rule.sample.w_values[i];
    if (!(a > 0.0)) rep.all_positive = false;
    if (a < (2.0 * w - w_min) * inv_2m || a > (2.0 * w + w_min) * inv_2m) rep.sandwich = false;
  }
  return rep;
}

/// Median over trials of max_i |m alpha_i - w(y_i)|, per sample size; the
/// almost-sure convergence of the weights makes this decay as m grows.
/// Only good-event trials (at the default conditioning threshold) enter the
/// median.  Trial streams are mix_seed(seed, counter) with the counter
/// running over sample sizes then trials.
struct WeightConvergencePoint {
  std::size_t m = 0;
  double median_max_deviation = 0.0;
};

inline std::vector<WeightConvergencePoint> weight_convergence_stat(
    const TensorBasis& basis, const std::vector<std::size_t>& m_list, std::size_t trials,
    std::uint64_t seed) {
  if (m_list.empty()) throw std::invalid_argument("weight_convergence_stat: empty m list");
  if (trials < 1) throw std::invalid_argument("weight_convergence_stat: trials must be >= 1");
  const std::size_t floor_m = min_samples({basis.size(), kDefaultR, kDefaultDelta});
  for (std::size_t m : m_list)
    if (m < floor_m)
      throw std::invalid_argument("weight_convergence_stat: m below the exactness budget");

  const SigmaSampler sampler(basis);
  std::vector<WeightConvergencePoint> out;
  std::uint64_t counter = 0;
  for (std::size_t m : m_list) {
    std::vector<double> stats;
    for (std::size_t t = 0; t < trials; ++t, ++counter) {
      const NodeSample nodes = sampler.sample_sigma(m, mix_seed(seed, counter));
      const DesignSystem sys = build_design(basis, nodes);
      const CubatureRule rule = cubature_weights(sys, nodes, kDefaultDelta);
      if (!rule.good_event) continue;
      double mx = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        mx = std::max(mx, std::abs(static_cast<double>(m) * rule.weights[i] -
                                   nodes.w_values[i]));
      stats.push_back(mx);
    }
    WeightConvergencePoint pt;
    pt.m = m;
    if (stats.empty()) {
      pt.median_max_deviation = std::numeric_limits<double>::quiet_NaN();
    } else {
      std::sort(stats.begin(), stats.end());
      const std::size_t half = stats.size() / 2;
      pt.median_max_deviation = stats.size() % 2 == 1
                                    ? stats[half]
                                    : 0.5 * (stats[half - 1] + stats[half]);
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace randcub
