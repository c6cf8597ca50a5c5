#ifndef TDSTAB_TESTS_FIXTURES_HPP
#define TDSTAB_TESTS_FIXTURES_HPP

// The canonical n=5 simulation fixture: rho=2 walk observed while
// sampling from the rho_hat=1 walk, gamma 0.6 (below the 2/(c+1) = 2/3
// perturbation bound), quadratic features orthonormalized so the
// parameter-space modes of A are well conditioned, and a harmonic
// schedule with gain calibrated to contract the slowest mode within 1e6
// steps.

#include "tdstab/chain.hpp"
#include "tdstab/simulate.hpp"
#include "tdstab/stability.hpp"
#include "tdstab/types.hpp"

namespace tdstab::fixtures {

inline Matrix orthonormal_quadratic_features(Index n) {
  Matrix poly(n, 3);
  for (Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1) / static_cast<double>(n);
    poly(i, 0) = 1.0;
    poly(i, 1) = x;
    poly(i, 2) = x * x;
  }
  const Matrix q = Eigen::HouseholderQR<Matrix>(poly).householderQ() *
                   Matrix::Identity(n, 3);
  return q;
}

struct WalkPair {
  MarkovChain original = build_simple_random_walk(5, 2.0);
  MarkovChain perturbed = build_simple_random_walk(5, 1.0);
  double gamma = 0.6;

  Vector reward() const {
    Vector r(5);
    r << 0.2, 0.4, 0.6, 0.8, 1.0;
    return r;
  }

  FeatureSetup setup() const {
    return FeatureSetup::create(orthonormal_quadratic_features(5), reward(),
                                gamma);
  }

  StepSchedule schedule() const { return StepSchedule::harmonic(8.0, 100.0); }
};

}  // namespace tdstab::fixtures

#endif  // TDSTAB_TESTS_FIXTURES_HPP
