#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

namespace randcub {

/// Multi-index nu in N_0^d, stored as a plain vector of nonnegative ints.
using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& nu) {
  return std::accumulate(nu.begin(), nu.end(), 0);
}

/// Graded lexicographic comparison: lower total degree first; within a
/// degree, lexicographically descending, so (1,0) precedes (0,1).  This is
/// the canonical enumeration order of every generated index set and fixes
/// the meaning of "first basis function" (the zero index).
inline bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return a > b;
}

/// Finite ordered set of multi-indices defining the polynomial space.
/// Invariants enforced at construction: fixed dimension, nonnegative
/// entries, no duplicates, and the zero index present and first (the
/// constant function must be the first basis element).
class MultiIndexSet {
 public:
  MultiIndexSet(int dim, std::vector<MultiIndex> indices)
      : dim_(dim), indices_(std::move(indices)) {
    if (dim_ < 1) throw std::invalid_argument("MultiIndexSet: dimension must be >= 1");
    if (indices_.empty()) throw std::invalid_argument("MultiIndexSet: empty index set");
    for (const auto& nu : indices_) {
      if (static_cast<int>(nu.size()) != dim_)
        throw std::invalid_argument("MultiIndexSet: index with wrong dimension");
      for (int e : nu)
        if (e < 0) throw std::invalid_argument("MultiIndexSet: negative index entry");
    }
    lookup_.insert(indices_.begin(), indices_.end());
    if (lookup_.size() != indices_.size())
      throw std::invalid_argument("MultiIndexSet: duplicate multi-index");
    if (total_degree(indices_.front()) != 0)
      throw std::invalid_argument("MultiIndexSet: zero multi-index must come first");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t j) const { return indices_[j]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  bool contains(const MultiIndex& nu) const { return lookup_.count(nu) > 0; }

  /// Largest entry over all indices (max univariate degree needed).
  int max_degree() const {
    int mx = 0;
    for (const auto& nu : indices_)
      for (int e : nu) mx = std::max(mx, e);
    return mx;
  }

 private:
  int dim_;
  std::vector<MultiIndex> indices_;
  std::set<MultiIndex> lookup_;
};

namespace detail {

inline void enumerate_total_degree(int dim, int order, int coord, int remaining,
                                   MultiIndex& current, std::vector<MultiIndex>& out) {
  if (coord == dim) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    current[coord] = e;
    enumerate_total_degree(dim, order, coord + 1, remaining - e, current, out);
  }
  current[coord] = 0;
}

inline void enumerate_hyperbolic(int dim, int order, int coord, long long product,
                                 MultiIndex& current, std::vector<MultiIndex>& out) {
  if (coord == dim) {
    out.push_back(current);
    return;
  }
  for (int e = 0;; ++e) {
    const long long p = product * (e + 1);
    if (p > order) break;
    current[coord] = e;
    enumerate_hyperbolic(dim, order, coord + 1, p, current, out);
  }
  current[coord] = 0;
}

}  // namespace detail

/// All nu with |nu|_1 <= order, graded-lex ordered.  Cardinality is
/// binomial(order + dim, dim).
inline MultiIndexSet total_degree_set(int dim, int order) {
  if (dim < 1) throw std::invalid_argument("total_degree_set: dimension must be >= 1");
  if (order < 0) throw std::invalid_argument("total_degree_set: order must be >= 0");
  std::vector<MultiIndex> out;
  MultiIndex current(dim, 0);
  detail::enumerate_total_degree(dim, order, 0, order, current, out);
  std::sort(out.begin(), out.end(), graded_lex_less);
  return MultiIndexSet(dim, std::move(out));
}

/// All nu with prod_q (nu_q + 1) <= order, graded-lex ordered.
inline MultiIndexSet hyperbolic_cross_set(int dim, int order) {
  if (dim < 1) throw std::invalid_argument("hyperbolic_cross_set: dimension must be >= 1");
  if (order < 1) throw std::invalid_argument("hyperbolic_cross_set: order must be >= 1");
  std::vector<MultiIndex> out;
  MultiIndex current(dim, 0);
  detail::enumerate_hyperbolic(dim, order, 0, 1, current, out);
  std::sort(out.begin(), out.end(), graded_lex_less);
  return MultiIndexSet(dim, std::move(out));
}

/// True iff the set is downward closed: for every nu in the set, every
/// immediate predecessor nu - e_q is also in the set (by induction this
/// covers all componentwise-smaller indices).
inline bool is_downward_closed(const MultiIndexSet& set) {
  for (const auto& nu : set.indices()) {
    MultiIndex pred = nu;
    for (int q = 0; q < set.dim(); ++q) {
      if (nu[q] == 0) continue;
      pred[q] = nu[q] - 1;
      const bool ok = set.contains(pred);
      pred[q] = nu[q];
      if (!ok) return false;
    }
  }
  return true;
}

}  // namespace randcub
