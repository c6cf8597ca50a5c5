#ifndef TDSTAB_GRAPH_HPP
#define TDSTAB_GRAPH_HPP

#include <cstdint>

#include "tdstab/chain.hpp"
#include "tdstab/types.hpp"

namespace tdstab {

/// Undirected weighted graph defining a reversible random walk. Weights
/// are nonnegative and exactly symmetric; a positive diagonal entry is a
/// self-loop. Every vertex must carry at least one positive weight.
class WeightedGraph {
 public:
  /// Validates and builds. Throws ConfigError on invalid input.
  static WeightedGraph from_weights(Matrix u);

  Index size() const { return u_.rows(); }
  const Matrix& weights() const { return u_; }
  double weight(Index i, Index j) const { return u_(i, j); }

 private:
  explicit WeightedGraph(Matrix u) : u_(std::move(u)) {}

  Matrix u_;
};

/// Random walk with p_ij = u_ij / sum_k u_ik. The stationary
/// distribution equals the row-weight shares.
MarkovChain build_graph_walk(const WeightedGraph& graph);

/// Weighted-graph representation u_ij = q_i p_ij of a reversible chain.
/// build_graph_walk(to_weighted_graph(chain)) reproduces the chain.
/// Throws ConfigError when the chain is not reversible.
WeightedGraph to_weighted_graph(const MarkovChain& chain);

/// Multiplies every edge weight by a factor drawn log-uniformly from
/// [1/delta, delta], symmetrically (f_ij = f_ji), seeded. Preserves the
/// edge set; the resulting perturbation_factor is at most delta^2.
WeightedGraph perturb_graph_weights(const WeightedGraph& graph, double delta,
                                    std::uint64_t rng_seed);

}  // namespace tdstab

#endif  // TDSTAB_GRAPH_HPP
