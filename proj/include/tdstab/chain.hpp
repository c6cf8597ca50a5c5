#ifndef TDSTAB_CHAIN_HPP
#define TDSTAB_CHAIN_HPP

#include <map>
#include <utility>

#include "tdstab/types.hpp"

namespace tdstab {

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kStationaryTolerance = 1e-10;
inline constexpr double kReversibilityTolerance = 1e-10;

/// Stationary row vector q of a row-stochastic matrix, q P = q, sum 1,
/// all entries positive. Solved densely from the null space of (P^T - I)
/// with a power-iteration fallback for ill-conditioned systems. Throws
/// ConfigError naming the failing property when P is not row-stochastic,
/// not irreducible, or not aperiodic.
Vector stationary_distribution(const Eigen::Ref<const Matrix>& p);

/// Finite irreducible aperiodic Markov chain with its stationary
/// distribution cached at construction. Immutable; cheap to copy and safe
/// to share across threads.
class MarkovChain {
 public:
  /// Validates and builds. Throws ConfigError on invalid input.
  static MarkovChain from_transition_matrix(Matrix p);

  Index size() const { return p_.rows(); }
  const Matrix& transition_matrix() const { return p_; }
  const Vector& stationary() const { return q_; }

  double prob(Index i, Index j) const { return p_(i, j); }
  bool supported(Index i, Index j) const { return p_(i, j) > 0.0; }

 private:
  MarkovChain(Matrix p, Vector q) : p_(std::move(p)), q_(std::move(q)) {}

  Matrix p_;
  Vector q_;
};

/// Transition ratios rho_ij = p_ij / p_ji for every supported pair.
class RatioTable {
 public:
  using Key = std::pair<Index, Index>;

  void insert(Index i, Index j, double value) { entries_[{i, j}] = value; }
  bool contains(Index i, Index j) const { return entries_.count({i, j}) > 0; }
  double at(Index i, Index j) const;
  const std::map<Key, double>& entries() const { return entries_; }

 private:
  std::map<Key, double> entries_;
};

/// Detailed balance check: max_ij |q_i p_ij - q_j p_ji| <= tol.
bool is_reversible(const MarkovChain& chain,
                   double tol = kReversibilityTolerance);

/// True iff p_ij > 0 <=> p_ji > 0 for all pairs. Weaker than
/// reversibility; enough for the transition ratios to exist.
bool has_reverse_support(const MarkovChain& chain);

/// True iff the supports of the two transition matrices coincide
/// elementwise. Throws ConfigError on dimension mismatch.
bool same_structure(const MarkovChain& original, const MarkovChain& perturbed);

/// rho_ij = p_ij / p_ji for every supported pair. Throws ConfigError
/// naming the offending pair when the support is not symmetric.
RatioTable transition_ratios(const MarkovChain& chain);

/// c >= 1, the maximum over supported pairs of
/// max{rho_hat/rho, rho/rho_hat}. Requires same structure and symmetric
/// support on both chains. Self-loop pairs contribute ratio 1.
double perturbation_factor(const MarkovChain& original,
                           const MarkovChain& perturbed);

/// Birth-death chain on n states realizing the given transition ratios
/// rho_{i,i+1} (length n-1) and per-state self-loop probabilities
/// (length n, interior entries applied exactly). Support is |i-j| = 1
/// plus self-loops at the two boundary states, whose probabilities absorb
/// the normalization slack. A zero hold[0] selects the same boundary
/// split as build_simple_random_walk; hold[n-1], when positive, is
/// cross-checked against the slack. Throws ConfigError when no valid
/// probability allocation exists.
MarkovChain build_birth_death(Index n, const Vector& ratios,
                              const Vector& hold);
MarkovChain build_birth_death(Index n, const Vector& ratios);

/// Constant-ratio birth-death chain: p_{i,i+1} = p_nn = rho/(rho+1) and
/// p_{i,i-1} = p_11 = 1/(rho+1).
MarkovChain build_simple_random_walk(Index n, double rho);

}  // namespace tdstab

#endif  // TDSTAB_CHAIN_HPP
