#include "tdstab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "tdstab/errors.hpp"

namespace tdstab {
namespace {

std::string state_label(Index i) { return std::to_string(i + 1); }

void require_row_stochastic(const Eigen::Ref<const Matrix>& p) {
  if (p.rows() < 2 || p.rows() != p.cols()) {
    throw ConfigError("transition matrix must be square with n >= 2, got " +
                      std::to_string(p.rows()) + "x" + std::to_string(p.cols()));
  }
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = 0; j < p.cols(); ++j) {
      if (!(p(i, j) >= 0.0 && p(i, j) <= 1.0)) {
        throw ConfigError("transition matrix entry (" + state_label(i) + "," +
                          state_label(j) + ") = " + std::to_string(p(i, j)) +
                          " is outside [0,1]");
      }
    }
    const double sum = p.row(i).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ConfigError("transition matrix row " + state_label(i) +
                        " sums to " + std::to_string(sum) + ", not 1");
    }
  }
}

std::vector<int> bfs_levels(const Eigen::Ref<const Matrix>& p, bool forward) {
  const Index n = p.rows();
  std::vector<int> level(static_cast<std::size_t>(n), -1);
  std::vector<Index> queue;
  queue.reserve(static_cast<std::size_t>(n));
  queue.push_back(0);
  level[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Index u = queue[head];
    for (Index v = 0; v < n; ++v) {
      const double edge = forward ? p(u, v) : p(v, u);
      if (edge > 0.0 && level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return level;
}

void require_irreducible(const Eigen::Ref<const Matrix>& p) {
  const auto fwd = bfs_levels(p, true);
  const auto bwd = bfs_levels(p, false);
  for (Index i = 0; i < p.rows(); ++i) {
    if (fwd[static_cast<std::size_t>(i)] < 0) {
      throw ConfigError("chain is reducible: state " + state_label(i) +
                        " is unreachable from state 1");
    }
    if (bwd[static_cast<std::size_t>(i)] < 0) {
      throw ConfigError("chain is reducible: state 1 is unreachable from state " +
                        state_label(i));
    }
  }
}

// Period of an irreducible chain: gcd over all support edges (u,v) of
// level(u) + 1 - level(v). A self-loop short-circuits to 1.
void require_aperiodic(const Eigen::Ref<const Matrix>& p) {
  const Index n = p.rows();
  for (Index i = 0; i < n; ++i) {
    if (p(i, i) > 0.0) return;
  }
  const auto level = bfs_levels(p, true);
  long long period = 0;
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      if (p(u, v) > 0.0) {
        const long long diff = level[static_cast<std::size_t>(u)] + 1 -
                               level[static_cast<std::size_t>(v)];
        period = std::gcd(period, diff);
      }
    }
  }
  if (period != 1) {
    throw ConfigError("chain is periodic with period " + std::to_string(period));
  }
}

double stationary_residual(const Eigen::Ref<const Matrix>& p, const Vector& q) {
  return (q.transpose() * p - q.transpose()).cwiseAbs().maxCoeff();
}

bool stationary_ok(const Eigen::Ref<const Matrix>& p, const Vector& q) {
  return q.minCoeff() > 0.0 && std::abs(q.sum() - 1.0) < 1e-12 &&
         stationary_residual(p, q) <= kStationaryTolerance;
}

Vector power_iteration(const Eigen::Ref<const Matrix>& p) {
  const Index n = p.rows();
  Vector q = Vector::Constant(n, 1.0 / static_cast<double>(n));
  for (int iter = 0; iter < 200000; ++iter) {
    Vector next = p.transpose() * q;
    next /= next.sum();
    const double delta = (next - q).cwiseAbs().maxCoeff();
    q = next;
    if (delta < 1e-16) break;
  }
  return q;
}

}  // namespace

Vector stationary_distribution(const Eigen::Ref<const Matrix>& p) {
  require_row_stochastic(p);
  require_irreducible(p);
  require_aperiodic(p);

  // Null space of (P^T - I), with the last equation swapped for the
  // normalization sum q_i = 1.
  const Index n = p.rows();
  Matrix m = p.transpose() - Matrix::Identity(n, n);
  m.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Vector q = m.colPivHouseholderQr().solve(rhs);

  if (!stationary_ok(p, q)) {
    q = power_iteration(p);
    if (!stationary_ok(p, q)) {
      throw NumericError(
          "stationary distribution solve failed: residual " +
          std::to_string(stationary_residual(p, q)) + " exceeds tolerance");
    }
  }
  return q;
}

MarkovChain MarkovChain::from_transition_matrix(Matrix p) {
  Vector q = stationary_distribution(p);
  return MarkovChain(std::move(p), std::move(q));
}

double RatioTable::at(Index i, Index j) const {
  const auto it = entries_.find({i, j});
  if (it == entries_.end()) {
    throw ConfigError("no transition ratio for pair (" + state_label(i) + "," +
                      state_label(j) + ")");
  }
  return it->second;
}

bool is_reversible(const MarkovChain& chain, double tol) {
  const Matrix& p = chain.transition_matrix();
  const Vector& q = chain.stationary();
  double worst = 0.0;
  for (Index i = 0; i < chain.size(); ++i) {
    for (Index j = i + 1; j < chain.size(); ++j) {
      worst = std::max(worst, std::abs(q(i) * p(i, j) - q(j) * p(j, i)));
    }
  }
  return worst <= tol;
}

bool has_reverse_support(const MarkovChain& chain) {
  const Matrix& p = chain.transition_matrix();
  for (Index i = 0; i < chain.size(); ++i) {
    for (Index j = 0; j < chain.size(); ++j) {
      if ((p(i, j) > 0.0) != (p(j, i) > 0.0)) return false;
    }
  }
  return true;
}

bool same_structure(const MarkovChain& original, const MarkovChain& perturbed) {
  if (original.size() != perturbed.size()) {
    throw ConfigError("structure comparison of chains with different state "
                      "counts: " + std::to_string(original.size()) + " vs " +
                      std::to_string(perturbed.size()));
  }
  for (Index i = 0; i < original.size(); ++i) {
    for (Index j = 0; j < original.size(); ++j) {
      if (original.supported(i, j) != perturbed.supported(i, j)) return false;
    }
  }
  return true;
}

RatioTable transition_ratios(const MarkovChain& chain) {
  const Matrix& p = chain.transition_matrix();
  RatioTable table;
  for (Index i = 0; i < chain.size(); ++i) {
    for (Index j = 0; j < chain.size(); ++j) {
      if (p(i, j) > 0.0) {
        if (p(j, i) <= 0.0) {
          throw ConfigError("transition ratio undefined: p(" + state_label(i) +
                            "," + state_label(j) + ") > 0 but p(" +
                            state_label(j) + "," + state_label(i) + ") = 0");
        }
        table.insert(i, j, p(i, j) / p(j, i));
      }
    }
  }
  return table;
}

double perturbation_factor(const MarkovChain& original,
                           const MarkovChain& perturbed) {
  if (!same_structure(original, perturbed)) {
    throw ConfigError("perturbation factor requires chains with identical "
                      "support structure");
  }
  const RatioTable rho = transition_ratios(original);
  const RatioTable rho_hat = transition_ratios(perturbed);
  double c = 1.0;
  for (const auto& [key, value] : rho.entries()) {
    const double ratio = rho_hat.at(key.first, key.second) / value;
    c = std::max({c, ratio, 1.0 / ratio});
  }
  return c;
}

// Realized through the path-graph weight recurrence: with row weights
// proportional to the stationary vector, the edge weights w_i must
// satisfy w_{i-1} + w_i = q_i (1 - hold_i), leaving the boundary
// self-loops to absorb the slack.
MarkovChain build_birth_death(Index n, const Vector& ratios,
                              const Vector& hold) {
  if (n < 2) {
    throw ConfigError("birth-death chain needs n >= 2");
  }
  if (ratios.size() != n - 1) {
    throw ConfigError("birth-death chain on " + std::to_string(n) +
                      " states needs " + std::to_string(n - 1) +
                      " transition ratios, got " + std::to_string(ratios.size()));
  }
  if (hold.size() != n) {
    throw ConfigError("hold vector must have one entry per state");
  }
  for (Index i = 0; i < n - 1; ++i) {
    if (!(ratios(i) > 0.0)) {
      throw ConfigError("transition ratios must be positive, ratio " +
                        std::to_string(i + 1) + " is " + std::to_string(ratios(i)));
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (!(hold(i) >= 0.0 && hold(i) < 1.0)) {
      throw ConfigError("self-loop probability at state " + state_label(i) +
                        " must be in [0,1)");
    }
  }

  Vector q(n);
  q(0) = 1.0;
  for (Index i = 1; i < n; ++i) q(i) = q(i - 1) * ratios(i - 1);
  if (!q.allFinite()) {
    throw ConfigError("infeasible probability allocation: stationary weights "
                      "overflow for the given ratios");
  }
  q /= q.sum();

  Vector edge(n - 1);
  edge(0) = hold(0) > 0.0 ? q(0) * (1.0 - hold(0))
                          : q(0) * ratios(0) / (1.0 + ratios(0));
  for (Index i = 1; i < n - 1; ++i) {
    edge(i) = q(i) * (1.0 - hold(i)) - edge(i - 1);
  }
  Vector loop(n);
  loop(0) = q(0) - edge(0);
  for (Index i = 1; i < n - 1; ++i) loop(i) = q(i) * hold(i);
  loop(n - 1) = q(n - 1) - edge(n - 2);
  // Cancellation can leave the slack a few ulp below an exact zero.
  for (Index i : {Index(0), n - 1}) {
    if (loop(i) < 0.0 && loop(i) > -1e-14 * q(i)) loop(i) = 0.0;
  }

  for (Index i = 0; i < n - 1; ++i) {
    if (!(edge(i) > 0.0)) {
      throw ConfigError("infeasible probability allocation: edge weight "
                        "between states " + state_label(i) + " and " +
                        state_label(i + 1) + " is nonpositive");
    }
  }
  if (loop(0) < 0.0 || loop(n - 1) < 0.0) {
    throw ConfigError("infeasible probability allocation: boundary self-loop "
                      "would be negative");
  }
  if (hold(n - 1) > 0.0 &&
      std::abs(loop(n - 1) / q(n - 1) - hold(n - 1)) > 1e-9) {
    throw ConfigError("infeasible probability allocation: requested self-loop "
                      "at state " + state_label(n - 1) + " is inconsistent "
                      "with the transition ratios");
  }

  Matrix p = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double row = (i > 0 ? edge(i - 1) : 0.0) +
                       (i < n - 1 ? edge(i) : 0.0) + loop(i);
    if (i > 0) p(i, i - 1) = edge(i - 1) / row;
    if (i < n - 1) p(i, i + 1) = edge(i) / row;
    if (loop(i) > 0.0) p(i, i) = loop(i) / row;
  }
  return MarkovChain::from_transition_matrix(std::move(p));
}

MarkovChain build_birth_death(Index n, const Vector& ratios) {
  return build_birth_death(n, ratios, Vector::Zero(n));
}

MarkovChain build_simple_random_walk(Index n, double rho) {
  if (n < 2) {
    throw ConfigError("simple random walk needs n >= 2");
  }
  if (!(rho > 0.0)) {
    throw ConfigError("simple random walk needs rho > 0");
  }
  const double up = rho / (rho + 1.0);
  const double down = 1.0 / (rho + 1.0);
  Matrix p = Matrix::Zero(n, n);
  p(0, 0) = down;
  p(n - 1, n - 1) = up;
  for (Index i = 0; i < n - 1; ++i) p(i, i + 1) = up;
  for (Index i = 1; i < n; ++i) p(i, i - 1) = down;
  return MarkovChain::from_transition_matrix(std::move(p));
}

}  // namespace tdstab
