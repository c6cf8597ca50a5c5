#ifndef TDSTAB_TESTS_GENERATORS_HPP
#define TDSTAB_TESTS_GENERATORS_HPP

// Seeded random instance generators shared by the property and
// acceptance tests.

#include <algorithm>

#include "tdstab/chain.hpp"
#include "tdstab/graph.hpp"
#include "tdstab/rng.hpp"
#include "tdstab/types.hpp"

namespace tdstab::gen {

/// Connected symmetric weight matrix: a path backbone, extra edges with
/// probability ~0.4, and at least one self-loop so the walk is
/// aperiodic.
inline WeightedGraph random_graph(SplitMix64& rng, Index n) {
  Matrix u = Matrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    u(i, i + 1) = u(i + 1, i) = rng.uniform(0.1, 1.0);
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 2; j < n; ++j) {
      if (rng.next_double() < 0.4) {
        u(i, j) = u(j, i) = rng.uniform(0.1, 1.0);
      }
    }
    if (rng.next_double() < 0.3) u(i, i) = rng.uniform(0.1, 1.0);
  }
  u(0, 0) = std::max(u(0, 0), rng.uniform(0.1, 1.0));
  return WeightedGraph::from_weights(std::move(u));
}

inline MarkovChain random_reversible_chain(SplitMix64& rng, Index n_min = 2,
                                           Index n_max = 8) {
  const Index n = n_min + static_cast<Index>(rng.next_below(
                              static_cast<std::uint64_t>(n_max - n_min + 1)));
  return build_graph_walk(random_graph(rng, n));
}

/// Reversible perturbation of a reversible chain via seeded symmetric
/// weight noise bounded by delta.
inline MarkovChain random_perturbation(SplitMix64& rng, const MarkovChain& chain,
                                       double delta) {
  const WeightedGraph graph = to_weighted_graph(chain);
  return build_graph_walk(perturb_graph_weights(graph, delta, rng.next_u64()));
}

/// Same support as the base chain, rows re-weighted at random; generally
/// not reversible.
inline MarkovChain random_same_support_chain(SplitMix64& rng,
                                             const MarkovChain& base) {
  const Index n = base.size();
  Matrix p = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (base.supported(i, j)) p(i, j) = rng.uniform(0.2, 1.0);
    }
    p.row(i) /= p.row(i).sum();
  }
  return MarkovChain::from_transition_matrix(std::move(p));
}

/// Feature matrix with entries in [-1, 1], re-drawn until comfortably
/// full column rank.
inline Matrix random_features(SplitMix64& rng, Index n, Index k) {
  for (;;) {
    Matrix phi(n, k);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < k; ++j) phi(i, j) = rng.uniform(-1.0, 1.0);
    }
    Eigen::JacobiSVD<Matrix> svd(phi);
    if (svd.singularValues()(k - 1) > 1e-2 * svd.singularValues()(0)) {
      return phi;
    }
  }
}

}  // namespace tdstab::gen

#endif  // TDSTAB_TESTS_GENERATORS_HPP
