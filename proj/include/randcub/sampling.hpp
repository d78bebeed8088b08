#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "randcub/induced_sampler.hpp"
#include "randcub/rng.hpp"
#include "randcub/tensor_basis.hpp"

namespace randcub {

enum class SampleSource { sigma, mu };

/// A batch of nodes with the Christoffel weight w evaluated at each node.
struct NodeSample {
  int dim = 0;
  std::size_t m = 0;
  std::vector<double> nodes;     // row-major, m x dim
  std::vector<double> w_values;  // length m
  SampleSource source = SampleSource::sigma;
  std::uint64_t seed = 0;        // stream seed the draws came from

  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Samples the auxiliary measure sigma = (1/n) sum_j psi_j^2 dmu by mixture:
/// pick a basis index uniformly, then draw each coordinate from the matching
/// univariate induced density.  Also samples the plain product measure mu
/// through the degree-0 induced sampler, so both paths share one code route
/// (and coincide exactly when n = 1, where sigma == mu and the mixture draw
/// is skipped).
///
/// Draw order per node is fixed and part of the reproducibility contract:
/// one uniform for the mixture index (only when n > 1), then one uniform per
/// coordinate.  All per-degree samplers are tabulated once at construction;
/// the object is immutable afterwards and safe to share across threads.
class SigmaSampler {
 public:
  explicit SigmaSampler(TensorBasis basis) : basis_(std::move(basis)) {
    const int kmax = basis_.index_set().max_degree();
    by_degree_.reserve(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k)
      by_degree_.emplace_back(basis_.family(), k);
  }

  const TensorBasis& basis() const { return basis_; }

  const UnivariateInducedSampler& degree_sampler(int k) const {
    return by_degree_.at(static_cast<std::size_t>(k));
  }

  NodeSample sample_sigma(std::size_t m, std::uint64_t seed) const {
    NodeSample out = empty_sample(m, SampleSource::sigma, seed);
    SplitMix64 rng(seed);
    const std::size_t n = basis_.size();
    const int d = basis_.dim();
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = n > 1 ? rng.uniform_index(n) : 0;
      const MultiIndex& nu = basis_.index_set()[j];
      for (int q = 0; q < d; ++q) {
        const double u = rng.uniform();
        out.nodes[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(q)] =
            by_degree_[static_cast<std::size_t>(nu[static_cast<std::size_t>(q)])].sample(u);
      }
      out.w_values[i] = basis_.weight(out.node(i));
    }
    return out;
  }

  NodeSample sample_mu(std::size_t m, std::uint64_t seed) const {
    NodeSample out = empty_sample(m, SampleSource::mu, seed);
    SplitMix64 rng(seed);
    const int d = basis_.dim();
    const UnivariateInducedSampler& base = by_degree_.front();
    for (std::size_t i = 0; i < m; ++i) {
      for (int q = 0; q < d; ++q) {
        const double u = rng.uniform();
        out.nodes[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(q)] = base.sample(u);
      }
      out.w_values[i] = basis_.weight(out.node(i));
    }
    return out;
  }

 private:
  NodeSample empty_sample(std::size_t m, SampleSource source, std::uint64_t seed) const {
    if (m < 1) throw std::invalid_argument("SigmaSampler: sample size must be >= 1");
    NodeSample out;
    out.dim = basis_.dim();
    out.m = m;
    out.nodes.resize(m * static_cast<std::size_t>(out.dim));
    out.w_values.resize(m);
    out.source = source;
    out.seed = seed;
    return out;
  }

  TensorBasis basis_;
  std::vector<UnivariateInducedSampler> by_degree_;
};

inline NodeSample sample_sigma(const TensorBasis& basis, std::size_t m, std::uint64_t seed) {
  return SigmaSampler(basis).sample_sigma(m, seed);
}

inline NodeSample sample_mu(const TensorBasis& basis, std::size_t m, std::uint64_t seed) {
  return SigmaSampler(basis).sample_mu(m, seed);
}

/// Convenience constructor mirroring the two free sampling functions.
inline SigmaSampler build_induced_sampler(const TensorBasis& basis) {
  return SigmaSampler(basis);
}

}  // namespace randcub
