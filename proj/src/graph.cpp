#include "tdstab/graph.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "tdstab/errors.hpp"
#include "tdstab/rng.hpp"

namespace tdstab {

WeightedGraph WeightedGraph::from_weights(Matrix u) {
  if (u.rows() < 2 || u.rows() != u.cols()) {
    throw ConfigError("weight matrix must be square with n >= 2");
  }
  for (Index i = 0; i < u.rows(); ++i) {
    for (Index j = 0; j < u.cols(); ++j) {
      if (!(u(i, j) >= 0.0) || !std::isfinite(u(i, j))) {
        throw ConfigError("edge weights must be finite and nonnegative");
      }
      if (u(i, j) != u(j, i)) {
        throw ConfigError("weight matrix must be exactly symmetric, differs "
                          "at (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ")");
      }
    }
    if (!(u.row(i).sum() > 0.0)) {
      throw ConfigError("vertex " + std::to_string(i + 1) +
                        " has no positive weight");
    }
  }
  return WeightedGraph(std::move(u));
}

MarkovChain build_graph_walk(const WeightedGraph& graph) {
  const Matrix& u = graph.weights();
  const Index n = graph.size();
  Matrix p(n, n);
  for (Index i = 0; i < n; ++i) {
    const double row = u.row(i).sum();
    if (!(row > 0.0)) {
      throw ConfigError("vertex " + std::to_string(i + 1) +
                        " has zero total weight");
    }
    p.row(i) = u.row(i) / row;
  }
  return MarkovChain::from_transition_matrix(std::move(p));
}

WeightedGraph to_weighted_graph(const MarkovChain& chain) {
  if (!is_reversible(chain)) {
    throw ConfigError("weighted-graph representation requires a reversible "
                      "chain");
  }
  const Matrix& p = chain.transition_matrix();
  const Vector& q = chain.stationary();
  const Index n = chain.size();
  Matrix u(n, n);
  for (Index i = 0; i < n; ++i) {
    u(i, i) = q(i) * p(i, i);
    for (Index j = i + 1; j < n; ++j) {
      // Detailed balance holds to tolerance only; symmetrize exactly.
      const double w = 0.5 * (q(i) * p(i, j) + q(j) * p(j, i));
      u(i, j) = w;
      u(j, i) = w;
    }
  }
  return WeightedGraph::from_weights(std::move(u));
}

WeightedGraph perturb_graph_weights(const WeightedGraph& graph, double delta,
                                    std::uint64_t rng_seed) {
  if (!(delta >= 1.0)) {
    throw ConfigError("weight perturbation needs delta >= 1");
  }
  const Index n = graph.size();
  Matrix u = graph.weights();
  SplitMix64 rng(rng_seed);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      if (u(i, j) > 0.0 && delta > 1.0) {
        const double f = rng.log_uniform(1.0 / delta, delta);
        u(i, j) *= f;
        u(j, i) = u(i, j);
      }
    }
  }
  return WeightedGraph::from_weights(std::move(u));
}

}  // namespace tdstab
