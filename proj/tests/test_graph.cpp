#include "tdstab/graph.hpp"

#include <cmath>

#include "doctest.h"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "tdstab/errors.hpp"

using namespace tdstab;

TEST_CASE("graph walk on an equal-weight complete graph is uniform") {
  Matrix u = Matrix::Ones(4, 4);
  u.diagonal().setZero();
  const MarkovChain chain = build_graph_walk(WeightedGraph::from_weights(u));
  CHECK((chain.stationary() - Vector::Constant(4, 0.25)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(is_reversible(chain));
}

TEST_CASE("graph walk stationary equals row-weight shares") {
  Matrix u(3, 3);
  u << 0, 1, 2,
       1, 0, 3,
       2, 3, 0;
  const MarkovChain chain = build_graph_walk(WeightedGraph::from_weights(u));
  CHECK(chain.stationary()(0) == doctest::Approx(3.0 / 12.0).epsilon(1e-13));
  CHECK(chain.stationary()(1) == doctest::Approx(4.0 / 12.0).epsilon(1e-13));
  CHECK(chain.stationary()(2) == doctest::Approx(5.0 / 12.0).epsilon(1e-13));
  CHECK(chain.prob(0, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  // Cross-check against the direct solve of q = qP.
  const Vector direct = oracle::power_iteration_stationary(chain.transition_matrix());
  CHECK((chain.stationary() - direct).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weighted graph validation") {
  Matrix asym(2, 2);
  asym << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_WITH_AS(WeightedGraph::from_weights(asym),
                       doctest::Contains("symmetric"), ConfigError);

  Matrix zero_row(3, 3);
  zero_row << 0, 1, 0,
              1, 0, 0,
              0, 0, 0;
  CHECK_THROWS_WITH_AS(WeightedGraph::from_weights(zero_row),
                       doctest::Contains("no positive weight"), ConfigError);
}

TEST_CASE("to_weighted_graph requires reversibility") {
  Matrix p = Matrix::Zero(3, 3);
  for (Index i = 0; i < 3; ++i) {
    p(i, (i + 1) % 3) = 0.9;
    p(i, (i + 2) % 3) = 0.1;
  }
  const MarkovChain cycle = MarkovChain::from_transition_matrix(p);
  CHECK_THROWS_AS(to_weighted_graph(cycle), ConfigError);
}

TEST_CASE("graph round-trip reproduces P on reversible chains") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const MarkovChain chain = gen::random_reversible_chain(rng);
    const MarkovChain rebuilt = build_graph_walk(to_weighted_graph(chain));
    CHECK((rebuilt.transition_matrix() - chain.transition_matrix())
              .cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("to_weighted_graph scales P by q, symmetric by detailed balance") {
  const MarkovChain walk = build_simple_random_walk(3, 2.0);
  const WeightedGraph graph = to_weighted_graph(walk);
  const Vector& q = walk.stationary();
  CHECK(graph.weight(0, 1) ==
        doctest::Approx(q(0) * 2.0 / 3.0).epsilon(1e-12));
  CHECK(graph.weight(1, 0) ==
        doctest::Approx(q(1) * 1.0 / 3.0).epsilon(1e-12));

  // Uniform q: weights proportional to P itself.
  Matrix p = Matrix::Constant(3, 3, 1.0 / 3.0);
  const MarkovChain flat = MarkovChain::from_transition_matrix(p);
  const WeightedGraph flat_graph = to_weighted_graph(flat);
  CHECK((flat_graph.weights() - p / 3.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("perturb_graph_weights: delta 1 is the identity") {
  SplitMix64 rng(5);
  const WeightedGraph graph = gen::random_graph(rng, 5);
  const WeightedGraph same = perturb_graph_weights(graph, 1.0, 123);
  CHECK((same.weights() - graph.weights()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perturb_graph_weights stays within the ratio bound and c <= delta^2") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const MarkovChain chain = gen::random_reversible_chain(rng);
    const WeightedGraph graph = to_weighted_graph(chain);
    const double delta = rng.uniform(1.0, 4.0);
    const WeightedGraph perturbed =
        perturb_graph_weights(graph, delta, rng.next_u64());

    for (Index i = 0; i < graph.size(); ++i) {
      for (Index j = 0; j < graph.size(); ++j) {
        const double u = graph.weight(i, j);
        const double u_hat = perturbed.weight(i, j);
        CHECK((u > 0.0) == (u_hat > 0.0));
        if (u > 0.0) {
          const double f = u_hat / u;
          CHECK(f >= 1.0 / delta - 1e-12);
          CHECK(f <= delta + 1e-12);
          CHECK(f == perturbed.weight(j, i) / graph.weight(j, i));
        }
      }
    }

    const MarkovChain rebuilt = build_graph_walk(perturbed);
    const double c = perturbation_factor(chain, rebuilt);
    CHECK(c <= delta * delta * (1.0 + 1e-12));
  }
}

TEST_CASE("perturb_graph_weights is deterministic in the seed") {
  SplitMix64 rng(8);
  const WeightedGraph graph = gen::random_graph(rng, 6);
  const WeightedGraph a = perturb_graph_weights(graph, 2.5, 777);
  const WeightedGraph b = perturb_graph_weights(graph, 2.5, 777);
  const WeightedGraph c = perturb_graph_weights(graph, 2.5, 778);
  CHECK((a.weights() - b.weights()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.weights() - c.weights()).cwiseAbs().maxCoeff() > 0.0);
}
