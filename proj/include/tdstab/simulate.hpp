#ifndef TDSTAB_SIMULATE_HPP
#define TDSTAB_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "tdstab/chain.hpp"
#include "tdstab/rng.hpp"
#include "tdstab/stability.hpp"
#include "tdstab/types.hpp"

namespace tdstab {

inline constexpr double kDivergenceNorm = 1e12;

/// Step-size schedule. The harmonic form a/(t + t0) satisfies the
/// Robbins-Monro conditions; a constant step does not and is kept for
/// diagnostics only.
struct StepSchedule {
  enum class Kind { Harmonic, Constant };

  static StepSchedule harmonic(double a = 0.5, double t0 = 100.0);
  static StepSchedule constant(double alpha);

  double at(std::int64_t t) const {
    return kind == Kind::Harmonic ? a / (static_cast<double>(t) + t0) : alpha;
  }
  bool robbins_monro() const { return kind == Kind::Harmonic; }

  Kind kind = Kind::Harmonic;
  double a = 0.5;
  double t0 = 100.0;
  double alpha = 0.0;
};

/// One transition of the sampling process: the next sampled state moves
/// under the perturbed chain while the temporal-difference target state
/// is drawn from the original chain's row of the current state. The next
/// state is drawn first; the two draws are independent given the current
/// state.
struct StepSample {
  Index next_state;
  Index td_state;
};

StepSample sample_step(Index state, const MarkovChain& original,
                       const MarkovChain& perturbed, SplitMix64& rng);

struct Snapshot {
  std::int64_t t;
  Vector w;
  /// ||w - w*||, NaN when the fixed point is unavailable.
  double dist_to_wstar;
};

struct SimulationTrace {
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  StepSchedule schedule;
  std::vector<Snapshot> snapshots;
  Vector w_final;
  std::optional<Vector> w_star;
  std::optional<double> final_pbe;
  double final_dist = 0.0;
  /// Running means over all executed steps of the per-step update matrix
  /// phi(s)(gamma phi(s')^T - phi(s)^T) and vector phi(s) r(s).
  Matrix mean_A;
  Vector mean_b;
  bool diverged = false;
};

/// Runs T updates w <- w + alpha_t d_t phi(s_t) with
/// d_t = r(s_t) + gamma phi(s'_t)^T w - phi(s_t)^T w, states sampled from
/// the perturbed chain and TD targets from the original. Deterministic
/// given the seed. A norm above kDivergenceNorm or a non-finite iterate
/// truncates the run and sets the divergence flag.
SimulationTrace td0_run(const MarkovChain& original,
                        const MarkovChain& perturbed,
                        const FeatureSetup& setup,
                        const StepSchedule& schedule, const Vector& w0,
                        std::int64_t total_steps, std::uint64_t seed,
                        std::int64_t snapshot_every, Index initial_state = 0);

/// Time averages of the per-step update matrix and vector accumulated by
/// td0_run; converge to the assembled A and b.
std::pair<Matrix, Vector> empirical_mean_Ab(const SimulationTrace& trace);

}  // namespace tdstab

#endif  // TDSTAB_SIMULATE_HPP
