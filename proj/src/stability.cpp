#include "tdstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tdstab/errors.hpp"

namespace tdstab {
namespace {

void validate_features(const Eigen::Ref<const Matrix>& phi, Index n) {
  if (phi.rows() != n) {
    throw ConfigError("feature matrix has " + std::to_string(phi.rows()) +
                      " rows for a chain on " + std::to_string(n) + " states");
  }
  if (phi.cols() < 1 || phi.cols() > n) {
    throw ConfigError("feature count must be between 1 and n, got " +
                      std::to_string(phi.cols()));
  }
  Eigen::JacobiSVD<Matrix> svd(phi);
  const auto& sigma = svd.singularValues();
  if (!(sigma(sigma.size() - 1) > kRankTolerance * sigma(0))) {
    throw ConfigError("feature matrix is rank deficient: smallest singular "
                      "value " + std::to_string(sigma(sigma.size() - 1)) +
                      " vs largest " + std::to_string(sigma(0)));
  }
}

void require_same_structure(const MarkovChain& original,
                            const MarkovChain& perturbed) {
  if (!same_structure(original, perturbed)) {
    throw ConfigError("original and perturbed chains must have identical "
                      "support structure");
  }
}

}  // namespace

FeatureSetup FeatureSetup::create(Matrix phi, Vector reward, double gamma) {
  validate_features(phi, phi.rows());
  if (reward.size() != phi.rows()) {
    throw ConfigError("reward vector length " + std::to_string(reward.size()) +
                      " does not match state count " +
                      std::to_string(phi.rows()));
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("discount factor must lie strictly inside (0,1), got " +
                      std::to_string(gamma));
  }
  return FeatureSetup(std::move(phi), std::move(reward), gamma);
}

std::pair<Matrix, Vector> assemble_A_b(const MarkovChain& original,
                                       const MarkovChain& perturbed,
                                       const FeatureSetup& setup) {
  require_same_structure(original, perturbed);
  if (setup.n() != original.size()) {
    throw ConfigError("feature setup is for " + std::to_string(setup.n()) +
                      " states, chains have " + std::to_string(original.size()));
  }
  const Matrix& phi = setup.phi();
  const auto q_hat = perturbed.stationary().asDiagonal();
  Matrix a = phi.transpose() *
             (setup.gamma() * (q_hat * original.transition_matrix()) -
              Matrix(q_hat)) * phi;
  Vector b = phi.transpose() * (q_hat * setup.reward());
  return {std::move(a), std::move(b)};
}

Matrix symmetrized_D(const MarkovChain& original, const MarkovChain& perturbed,
                     double gamma) {
  const Matrix qp = perturbed.stationary().asDiagonal() *
                    original.transition_matrix();
  return Matrix(perturbed.stationary().asDiagonal()) -
         0.5 * gamma * (qp + qp.transpose());
}

Vector lemma1_gamma_bounds(const MarkovChain& original,
                           const MarkovChain& perturbed) {
  require_same_structure(original, perturbed);
  const Vector& q_hat = perturbed.stationary();
  const Vector incoming = original.transition_matrix().transpose() * q_hat;
  return (2.0 / (1.0 + incoming.array() / q_hat.array())).matrix();
}

double theorem2_bound(double c) {
  if (!(c >= 1.0)) {
    throw ConfigError("perturbation factor must satisfy c >= 1, got " +
                      std::to_string(c));
  }
  return 2.0 / (c + 1.0);
}

double corollary1_bound(double rho, double delta) {
  if (!(rho > 0.0) || !(delta > 0.0)) {
    throw ConfigError("corollary1_bound needs rho > 0 and delta > 0");
  }
  const double boundary_low = 2.0 * (rho + 1.0) / (rho + 2.0 + delta * rho);
  const double boundary_high = 2.0 * (rho + 1.0) / (2.0 * rho + 1.0 + 1.0 / delta);
  return std::min(boundary_low, boundary_high);
}

MaxGammaResult max_nd_gamma(const MarkovChain& original,
                            const MarkovChain& perturbed,
                            const Eigen::Ref<const Matrix>& phi, double tol) {
  require_same_structure(original, perturbed);
  validate_features(phi, original.size());
  if (!(tol > 0.0 && tol < 0.1)) {
    throw ConfigError("bisection tolerance must lie in (0, 0.1)");
  }

  // A(gamma) = gamma * M1 - M0 is affine in gamma, so only two dense
  // products are needed up front.
  const auto q_hat = perturbed.stationary().asDiagonal();
  const Matrix m1 = phi.transpose() * (q_hat * original.transition_matrix()) * phi;
  const Matrix m0 = phi.transpose() * (q_hat * phi);
  // The margin vanishes linearly at the edge, so deciding it against the
  // reporting tolerance would bias the threshold low; a near-roundoff
  // floor keeps the located edge consistent with the analytic bounds.
  constexpr double kEdgeTolerance = 1e-14;
  const auto nd_at = [&](double gamma) {
    return is_negative_definite(Matrix(gamma * m1 - m0), kEdgeTolerance).is_nd;
  };

  const double lo_edge = tol;
  const double hi_edge = 1.0 - tol;
  if (!nd_at(lo_edge)) {
    return MaxGammaResult{0.0, true, true};
  }

  // Interval guard: the n.d. region should be a prefix of the gamma axis.
  constexpr int kSweepPoints = 64;
  std::vector<bool> sweep(kSweepPoints);
  bool monotone = true;
  for (int k = 0; k < kSweepPoints; ++k) {
    const double gamma = (k + 1) / static_cast<double>(kSweepPoints + 1);
    sweep[static_cast<std::size_t>(k)] = nd_at(gamma);
    if (k > 0 && sweep[static_cast<std::size_t>(k)] &&
        !sweep[static_cast<std::size_t>(k - 1)]) {
      monotone = false;
    }
  }

  if (monotone) {
    if (nd_at(hi_edge)) {
      return MaxGammaResult{1.0, false, true};
    }
    double lo = lo_edge;
    double hi = hi_edge;
    for (int k = 0; k < kSweepPoints; ++k) {
      const double gamma = (k + 1) / static_cast<double>(kSweepPoints + 1);
      if (sweep[static_cast<std::size_t>(k)]) {
        lo = std::max(lo, gamma);
      } else {
        hi = std::min(hi, gamma);
        break;
      }
    }
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (nd_at(mid) ? lo : hi) = mid;
    }
    return MaxGammaResult{lo, false, true};
  }

  // Non-interval region: scan from above at a coarse resolution, then
  // tighten the upper edge of the highest n.d. cell.
  const double coarse = std::max(tol, 1e-4);
  double lo = lo_edge;
  double hi = hi_edge;
  for (double gamma = hi_edge; gamma > lo_edge; gamma -= coarse) {
    if (nd_at(gamma)) {
      lo = gamma;
      hi = std::min(gamma + coarse, hi_edge);
      break;
    }
  }
  if (lo == lo_edge && !nd_at(lo)) {
    return MaxGammaResult{0.0, true, false};
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (nd_at(mid) ? lo : hi) = mid;
  }
  return MaxGammaResult{lo >= hi_edge - tol ? 1.0 : lo, false, false};
}

Vector td_fixed_point(const Eigen::Ref<const Matrix>& a,
                      const Eigen::Ref<const Vector>& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw ConfigError("td_fixed_point needs square A matching b");
  }
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) {
    throw NumericError("matrix A is singular; the TD fixed point does not "
                       "exist -- reduce the discount factor");
  }
  Vector w = lu.solve(-b);
  const double residual = (a * w + b).norm();
  if (residual > 1e-10 * std::max(1.0, b.norm())) {
    throw NumericError("TD fixed-point solve residual " +
                       std::to_string(residual) + " exceeds tolerance; "
                       "reduce the discount factor");
  }
  return w;
}

Vector exact_value_function(const MarkovChain& original,
                            const Eigen::Ref<const Vector>& reward,
                            double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("discount factor must lie strictly inside (0,1)");
  }
  if (reward.size() != original.size()) {
    throw ConfigError("reward vector length does not match state count");
  }
  const Index n = original.size();
  const Matrix system = Matrix::Identity(n, n) -
                        gamma * original.transition_matrix();
  return system.partialPivLu().solve(reward);
}

double projected_bellman_error(const Eigen::Ref<const Vector>& w,
                               const MarkovChain& original,
                               const MarkovChain& perturbed,
                               const FeatureSetup& setup) {
  if (w.size() != setup.k()) {
    throw ConfigError("weight vector length does not match feature count");
  }
  const Matrix& phi = setup.phi();
  const auto q_hat = perturbed.stationary().asDiagonal();
  const Matrix gram = phi.transpose() * (q_hat * phi);
  const Vector bellman = setup.reward() +
                         setup.gamma() * original.transition_matrix() * (phi * w);
  const Vector projected = Eigen::LDLT<Matrix>(gram).solve(
      phi.transpose() * (q_hat * bellman));
  const Vector diff = projected - w;
  return std::sqrt(std::max(0.0, double(diff.transpose() * gram * diff)));
}

StabilityReport analyze(const MarkovChain& original,
                        const MarkovChain& perturbed,
                        const FeatureSetup& setup,
                        const AnalyzeOptions& options) {
  StabilityReport report;
  report.n = original.size();
  report.k = setup.k();
  report.gamma = setup.gamma();

  auto [a, b] = assemble_A_b(original, perturbed, setup);
  report.A = std::move(a);
  report.b = std::move(b);
  report.D = symmetrized_D(original, perturbed, setup.gamma());

  const NdTest nd = is_negative_definite(report.A);
  report.is_nd = nd.is_nd;
  report.min_sym_eig = nd.min_sym_eig;

  report.lemma1_bounds = lemma1_gamma_bounds(original, perturbed);
  report.lemma1_min = report.lemma1_bounds.minCoeff();

  if (has_reverse_support(original) && has_reverse_support(perturbed)) {
    report.perturbation_c = perturbation_factor(original, perturbed);
    report.theorem2 = theorem2_bound(report.perturbation_c);
  } else {
    report.perturbation_c = std::numeric_limits<double>::quiet_NaN();
    report.theorem2 = std::numeric_limits<double>::quiet_NaN();
  }

  if (options.simple_walk_rho && options.simple_walk_rho_hat) {
    report.corollary1 = corollary1_bound(
        *options.simple_walk_rho,
        *options.simple_walk_rho_hat / *options.simple_walk_rho);
  }

  const MaxGammaResult max_gamma =
      max_nd_gamma(original, perturbed, setup.phi(), options.bisect_tol);
  report.max_nd_gamma = max_gamma.gamma;
  report.nd_nowhere = max_gamma.never_nd;

  try {
    Vector w_star = td_fixed_point(report.A, report.b);
    report.pbe_at_w_star =
        projected_bellman_error(w_star, original, perturbed, setup);
    report.w_star = std::move(w_star);
  } catch (const NumericError&) {
    // Singular A: the report simply carries no fixed point.
  }
  return report;
}

}  // namespace tdstab
