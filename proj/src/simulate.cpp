#include "tdstab/simulate.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "tdstab/errors.hpp"

namespace tdstab {
namespace {

Index sample_categorical(const Eigen::Ref<const Matrix>& p, Index row,
                         double u) {
  double cumulative = 0.0;
  const Index n = p.cols();
  for (Index j = 0; j < n; ++j) {
    cumulative += p(row, j);
    if (u < cumulative) return j;
  }
  return n - 1;
}

}  // namespace

StepSchedule StepSchedule::harmonic(double a, double t0) {
  if (!(a > 0.0) || !(t0 >= 1.0)) {
    throw ConfigError("harmonic schedule needs a > 0 and t0 >= 1");
  }
  StepSchedule s;
  s.kind = Kind::Harmonic;
  s.a = a;
  s.t0 = t0;
  return s;
}

StepSchedule StepSchedule::constant(double alpha) {
  if (!(alpha > 0.0)) {
    throw ConfigError("constant schedule needs alpha > 0");
  }
  StepSchedule s;
  s.kind = Kind::Constant;
  s.alpha = alpha;
  return s;
}

StepSample sample_step(Index state, const MarkovChain& original,
                       const MarkovChain& perturbed, SplitMix64& rng) {
  const Index next =
      sample_categorical(perturbed.transition_matrix(), state, rng.next_double());
  const Index td =
      sample_categorical(original.transition_matrix(), state, rng.next_double());
  return StepSample{next, td};
}

SimulationTrace td0_run(const MarkovChain& original,
                        const MarkovChain& perturbed,
                        const FeatureSetup& setup,
                        const StepSchedule& schedule, const Vector& w0,
                        std::int64_t total_steps, std::uint64_t seed,
                        std::int64_t snapshot_every, Index initial_state) {
  if (!same_structure(original, perturbed)) {
    throw ConfigError("simulation requires chains with identical support "
                      "structure");
  }
  if (setup.n() != original.size()) {
    throw ConfigError("feature setup does not match the chain's state count");
  }
  if (w0.size() != setup.k()) {
    throw ConfigError("initial weights must have one entry per feature");
  }
  if (total_steps < 1) {
    throw ConfigError("step count must be positive");
  }
  if (snapshot_every < 1) {
    throw ConfigError("snapshot interval must be positive");
  }
  if (initial_state < 0 || initial_state >= original.size()) {
    throw ConfigError("initial state out of range");
  }

  const Matrix& phi = setup.phi();
  const Vector& reward = setup.reward();
  const double gamma = setup.gamma();
  const Index k = setup.k();

  SimulationTrace trace;
  trace.seed = seed;
  trace.schedule = schedule;
  trace.mean_A = Matrix::Zero(k, k);
  trace.mean_b = Vector::Zero(k);

  auto [a, b] = assemble_A_b(original, perturbed, setup);
  try {
    trace.w_star = td_fixed_point(a, b);
  } catch (const NumericError&) {
    // No fixed point: distances are reported as NaN.
  }
  const auto dist_to_star = [&](const Vector& w) {
    return trace.w_star ? (w - *trace.w_star).norm()
                        : std::numeric_limits<double>::quiet_NaN();
  };

  SplitMix64 rng(seed);
  Vector w = w0;
  Vector w_prev = w0;
  Index state = initial_state;
  trace.snapshots.push_back(Snapshot{0, w, dist_to_star(w)});

  std::int64_t executed = 0;
  for (std::int64_t t = 0; t < total_steps; ++t) {
    const StepSample step = sample_step(state, original, perturbed, rng);
    const auto feat = phi.row(state).transpose();
    const double d = reward(state) +
                     gamma * phi.row(step.td_state).dot(w) - phi.row(state).dot(w);
    w_prev = w;
    w += schedule.at(t) * d * feat;

    const double norm2 = w.squaredNorm();
    if (!std::isfinite(norm2) || norm2 > kDivergenceNorm * kDivergenceNorm) {
      w = w_prev;
      trace.diverged = true;
      break;
    }

    trace.mean_A.noalias() +=
        feat * (gamma * phi.row(step.td_state) - phi.row(state));
    trace.mean_b.noalias() += feat * reward(state);
    ++executed;

    if (executed % snapshot_every == 0 && executed < total_steps) {
      trace.snapshots.push_back(Snapshot{executed, w, dist_to_star(w)});
    }
    state = step.next_state;
  }

  trace.steps = executed;
  trace.w_final = w;
  trace.final_dist = dist_to_star(w);
  if (trace.snapshots.back().t < executed) {
    trace.snapshots.push_back(Snapshot{executed, w, trace.final_dist});
  }
  if (executed > 0) {
    trace.mean_A /= static_cast<double>(executed);
    trace.mean_b /= static_cast<double>(executed);
  }
  const double pbe = projected_bellman_error(w, original, perturbed, setup);
  if (std::isfinite(pbe)) trace.final_pbe = pbe;
  return trace;
}

std::pair<Matrix, Vector> empirical_mean_Ab(const SimulationTrace& trace) {
  if (trace.steps < 1) {
    throw ConfigError("trace holds no executed steps");
  }
  return {trace.mean_A, trace.mean_b};
}

}  // namespace tdstab
