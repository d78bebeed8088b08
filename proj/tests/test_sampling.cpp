#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "randcub/rng.hpp"
#include "randcub/sampling.hpp"
#include "oracles.hpp"

using namespace randcub;
using Catch::Approx;

namespace {

std::vector<double> draw_univariate(const UnivariateInducedSampler& s, std::size_t m,
                                    std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> out(m);
  for (double& t : out) t = s.sample(rng.uniform());
  return out;
}

}  // namespace

TEST_CASE("degree zero sampler reproduces the base measure") {
  const UnivariateInducedSampler s(PolynomialFamily::legendre(), 0);
  REQUIRE(s.density(0.3) == Approx(0.5).margin(1e-12));
  REQUIRE(s.cdf(0.0) == Approx(0.5).margin(1e-9));
  REQUIRE(s.cdf(0.5) == Approx(0.75).margin(1e-9));
  REQUIRE(s.sample(0.25) == Approx(-0.5).margin(1e-9));
}

TEST_CASE("legendre degree one induced law has closed form (t^3+1)/2") {
  const UnivariateInducedSampler s(PolynomialFamily::legendre(), 1);
  for (double t = -0.95; t < 1.0; t += 0.05)
    REQUIRE(s.cdf(t) == Approx(0.5 * (t * t * t + 1.0)).margin(1e-8));
  // skip the neighborhood of u = 1/2: the inverse has a cube-root saddle
  // there, so matching the cdf to 1e-12 pins t only to about 1e-4
  for (double u = 0.02; u < 1.0; u += 0.04)
    if (std::abs(2.0 * u - 1.0) > 0.02)
      REQUIRE(s.sample(u) == Approx(std::cbrt(2.0 * u - 1.0)).margin(1e-8));
}

TEST_CASE("chebyshev degree two induced law matches the trig closed form") {
  const UnivariateInducedSampler s(PolynomialFamily::chebyshev(), 2);
  for (double t = -0.99; t < 1.0; t += 0.03) {
    const double theta = std::acos(t);
    const double f = 1.0 - theta / M_PI - std::sin(4.0 * theta) / (4.0 * M_PI);
    REQUIRE(s.cdf(t) == Approx(f).margin(1e-6));
  }
}

TEST_CASE("jacobi(1,0) degree one induced law matches the quartic closed form") {
  const UnivariateInducedSampler s(PolynomialFamily::jacobi(1, 0), 1);
  const auto f = [](double t) {
    return (-2.25 * t * t * t * t + t * t * t + 2.5 * t * t + t) / 4.0 + 0.4375;
  };
  REQUIRE(f(1.0) == Approx(1.0).margin(1e-15));
  for (double t = -0.95; t < 1.0; t += 0.05)
    REQUIRE(s.cdf(t) == Approx(f(t)).margin(1e-8));
}

TEST_CASE("inversion round trip cdf(sample(u)) = u") {
  struct Case {
    PolynomialFamily fam;
    int degree;
  };
  const std::vector<Case> cases{
      {PolynomialFamily::legendre(), 3},
      {PolynomialFamily::chebyshev(), 2},
      {PolynomialFamily::hermite(), 2},
      {PolynomialFamily::jacobi(1, 0), 1},
      {PolynomialFamily::legendre(), 8},
  };
  for (const Case& c : cases) {
    const UnivariateInducedSampler s(c.fam, c.degree);
    for (double u = 0.001; u < 1.0; u += 0.007)
      REQUIRE(s.cdf(s.sample(u)) == Approx(u).margin(1e-9));
  }
}

TEST_CASE("cdf is monotone and pinned at the domain ends") {
  for (const auto& fam : {PolynomialFamily::legendre(), PolynomialFamily::chebyshev(),
                          PolynomialFamily::jacobi(2, 1)}) {
    const UnivariateInducedSampler s(fam, 4);
    REQUIRE(s.cdf(-1.0) == 0.0);
    REQUIRE(s.cdf(1.0) == 1.0);
    double prev = 0.0;
    for (double t = -0.99; t < 1.0; t += 0.01) {
      const double c = s.cdf(t);
      REQUIRE(c > prev);
      prev = c;
    }
  }
  const UnivariateInducedSampler h(PolynomialFamily::hermite(), 2);
  REQUIRE(h.cdf(0.0) == Approx(0.5).margin(1e-6));
  double prev = -1.0;
  for (double t = -14.0; t <= 14.0; t += 0.25) {
    const double c = h.cdf(t);
    REQUIRE(c >= prev);
    prev = c;
  }
}

TEST_CASE("empirical law of induced draws passes a KS check") {
  struct Case {
    PolynomialFamily fam;
    int degree;
  };
  const std::vector<Case> cases{
      {PolynomialFamily::legendre(), 5},
      {PolynomialFamily::chebyshev(), 3},
      {PolynomialFamily::hermite(), 4},
      {PolynomialFamily::jacobi(1, 0), 2},
  };
  std::uint64_t seed = 2024u;
  for (const Case& c : cases) {
    const UnivariateInducedSampler s(c.fam, c.degree);
    const std::vector<double> draws = draw_univariate(s, 20000, seed++);
    const double ks = oracles::ks_distance(draws, [&](double t) { return s.cdf(t); });
    REQUIRE(ks < 0.015);
  }
}

TEST_CASE("legendre degree one induced second moment is 3/5") {
  const UnivariateInducedSampler s(PolynomialFamily::legendre(), 1);
  const std::vector<double> draws = draw_univariate(s, 50000, 77u);
  double mean_sq = 0.0;
  for (double t : draws) mean_sq += t * t;
  mean_sq /= static_cast<double>(draws.size());
  REQUIRE(mean_sq == Approx(0.6).margin(0.01));
}

TEST_CASE("hermite draws stay inside the truncated domain") {
  const int k = 6;
  const UnivariateInducedSampler s(PolynomialFamily::hermite(), k);
  const double cap = std::sqrt(2.0 * k + 1.0) + 12.0;
  const std::vector<double> draws = draw_univariate(s, 5000, 11u);
  for (double t : draws) REQUIRE(std::abs(t) <= cap);
}

TEST_CASE("sigma batches are deterministic in the seed") {
  const TensorBasis basis(PolynomialFamily::legendre(), total_degree_set(2, 2));
  const SigmaSampler sampler(basis);
  const NodeSample a = sampler.sample_sigma(64, 5u);
  const NodeSample b = sampler.sample_sigma(64, 5u);
  const NodeSample c = sampler.sample_sigma(64, 6u);
  REQUIRE(a.nodes == b.nodes);
  REQUIRE(a.w_values == b.w_values);
  REQUIRE(a.nodes != c.nodes);
  REQUIRE(a.seed == 5u);
  REQUIRE(a.source == SampleSource::sigma);
  REQUIRE(a.m == 64);
  REQUIRE(a.dim == 2);
}

TEST_CASE("sigma batch weights match a direct recomputation") {
  const TensorBasis basis(PolynomialFamily::chebyshev(), total_degree_set(2, 2));
  const SigmaSampler sampler(basis);
  const NodeSample s = sampler.sample_sigma(200, 31u);
  for (std::size_t i = 0; i < s.m; ++i) {
    const double w = s.w_values[i];
    REQUIRE(w == basis.weight(s.node(i)));
    REQUIRE(w > 0.0);
    REQUIRE(w <= static_cast<double>(basis.size()) + 1e-12);
  }
}

TEST_CASE("draw order contract: one mixture uniform then one per coordinate") {
  const TensorBasis basis(PolynomialFamily::legendre(), total_degree_set(1, 1));
  const SigmaSampler sampler(basis);
  const std::uint64_t seed = 99u;
  const NodeSample got = sampler.sample_sigma(16, seed);

  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < got.m; ++i) {
    const std::size_t j = rng.uniform_index(basis.size());
    const int degree = basis.index_set()[j][0];
    const double t = sampler.degree_sampler(degree).sample(rng.uniform());
    REQUIRE(got.nodes[i] == t);
  }
}

TEST_CASE("mu batches replay through the degree zero sampler") {
  const TensorBasis basis(PolynomialFamily::legendre(), total_degree_set(2, 3));
  const SigmaSampler sampler(basis);
  const std::uint64_t seed = 123u;
  const NodeSample got = sampler.sample_mu(10, seed);
  REQUIRE(got.source == SampleSource::mu);

  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < got.m; ++i)
    for (int q = 0; q < got.dim; ++q) {
      const double t = sampler.degree_sampler(0).sample(rng.uniform());
      REQUIRE(got.nodes[i * 2 + static_cast<std::size_t>(q)] == t);
    }
}

TEST_CASE("sigma equals mu bit for bit when the basis is a single constant") {
  const TensorBasis basis(PolynomialFamily::legendre(), total_degree_set(2, 0));
  const SigmaSampler sampler(basis);
  const NodeSample a = sampler.sample_sigma(128, 41u);
  const NodeSample b = sampler.sample_mu(128, 41u);
  REQUIRE(a.nodes == b.nodes);
  for (double w : a.w_values) REQUIRE(w == 1.0);
}

TEST_CASE("weights average to one under the sigma law") {
  const TensorBasis basis(PolynomialFamily::legendre(), total_degree_set(2, 2));
  const SigmaSampler sampler(basis);
  const std::size_t m = 20000;
  const NodeSample s = sampler.sample_sigma(m, 2718u);
  const double avg = oracles::mean(s.w_values);
  REQUIRE(std::abs(avg - 1.0) < 5.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("weighted second moments of the basis are near the identity") {
  const TensorBasis basis(PolynomialFamily::legendre(), total_degree_set(2, 2));
  const SigmaSampler sampler(basis);
  const std::size_t m = 20000;
  const std::size_t n = basis.size();
  const NodeSample s = sampler.sample_sigma(m, 314159u);
  Matrix g(n, n);
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < m; ++i) {
    basis.eval_into(s.node(i), psi);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        g(a, b) += s.w_values[i] * psi[a] * psi[b] / static_cast<double>(m);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      REQUIRE(g(a, b) == Approx(a == b ? 1.0 : 0.0).margin(0.08));
}

TEST_CASE("argument validation") {
  const TensorBasis basis(PolynomialFamily::legendre(), total_degree_set(1, 1));
  const SigmaSampler sampler(basis);
  REQUIRE_THROWS_AS(sampler.sample_sigma(0, 1u), std::invalid_argument);
  const UnivariateInducedSampler s(PolynomialFamily::legendre(), 1);
  REQUIRE_THROWS_AS(s.sample(-0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(s.sample(1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(UnivariateInducedSampler(PolynomialFamily::legendre(), -1),
                    std::invalid_argument);
}
