#ifndef TDSTAB_STABILITY_HPP
#define TDSTAB_STABILITY_HPP

#include <optional>
#include <utility>

#include "tdstab/chain.hpp"
#include "tdstab/linalg.hpp"
#include "tdstab/types.hpp"

namespace tdstab {

inline constexpr double kRankTolerance = 1e-8;
inline constexpr double kBisectTolerance = 1e-6;

/// Linear value-function approximation setup: features Phi (n x K, full
/// column rank), per-state rewards, discount factor in (0,1).
class FeatureSetup {
 public:
  static FeatureSetup create(Matrix phi, Vector reward, double gamma);

  Index n() const { return phi_.rows(); }
  Index k() const { return phi_.cols(); }
  const Matrix& phi() const { return phi_; }
  const Vector& reward() const { return reward_; }
  double gamma() const { return gamma_; }

 private:
  FeatureSetup(Matrix phi, Vector reward, double gamma)
      : phi_(std::move(phi)), reward_(std::move(reward)), gamma_(gamma) {}

  Matrix phi_;
  Vector reward_;
  double gamma_;
};

/// A = Phi^T (gamma Qhat P - Qhat) Phi and b = Phi^T Qhat r, with Qhat
/// built from the perturbed chain's stationary distribution and P from
/// the original chain. Requires same structure.
std::pair<Matrix, Vector> assemble_A_b(const MarkovChain& original,
                                       const MarkovChain& perturbed,
                                       const FeatureSetup& setup);

/// D = Qhat - 0.5 gamma (Qhat P + P^T Qhat): the symmetric matrix with
/// x^T D x = x^T (Qhat - gamma Qhat P) x for all x.
Matrix symmetrized_D(const MarkovChain& original, const MarkovChain& perturbed,
                     double gamma);

/// Per-state sufficient discount bounds 2 / (1 + (1/qhat_i) sum_j qhat_j
/// p_ji). Any gamma below their minimum makes A negative definite, for
/// every full-column-rank feature matrix.
Vector lemma1_gamma_bounds(const MarkovChain& original,
                           const MarkovChain& perturbed);

/// 2 / (c + 1) for a perturbation factor c >= 1.
double theorem2_bound(double c);

/// min{ 2(rho+1)/(rho+2+delta rho), 2(rho+1)/(2 rho+1+1/delta) } for
/// simple random walks with constant ratios rho and rho_hat = delta rho.
double corollary1_bound(double rho, double delta);

struct MaxGammaResult {
  double gamma = 0.0;
  /// Set when A fails to be negative definite even at the smallest
  /// gamma probed; gamma is reported as 0.
  bool never_nd = false;
  /// Cleared when the verification sweep found a non-interval n.d.
  /// region and the search fell back to a grid scan.
  bool monotone = true;
};

/// Largest gamma in (0,1) keeping A negative definite, located by
/// bisection to within tol. Returns exactly 1 when A is still n.d. at
/// 1 - tol. A 64-point sweep guards the interval assumption; on
/// violation the search downgrades to a grid scan from above.
MaxGammaResult max_nd_gamma(const MarkovChain& original,
                            const MarkovChain& perturbed,
                            const Eigen::Ref<const Matrix>& phi,
                            double tol = kBisectTolerance);

/// Unique solution of A w + b = 0. Throws NumericError advising a
/// smaller discount factor when A is singular.
Vector td_fixed_point(const Eigen::Ref<const Matrix>& a,
                      const Eigen::Ref<const Vector>& b);

/// V = (I - gamma P)^{-1} r, the expected discounted reward per start
/// state.
Vector exact_value_function(const MarkovChain& original,
                            const Eigen::Ref<const Vector>& reward,
                            double gamma);

/// || Proj_Qhat (r + gamma P Phi w) - Phi w ||_Qhat, the projected
/// Bellman error of the approximation Phi w under the sampling
/// distribution's weighted norm.
double projected_bellman_error(const Eigen::Ref<const Vector>& w,
                               const MarkovChain& original,
                               const MarkovChain& perturbed,
                               const FeatureSetup& setup);

/// Everything the analyzer reports for one (original, perturbed,
/// features, gamma) instance.
struct StabilityReport {
  Index n = 0;
  Index k = 0;
  double gamma = 0.0;
  Matrix A;
  Vector b;
  Matrix D;
  double min_sym_eig = 0.0;
  bool is_nd = false;
  Vector lemma1_bounds;
  double lemma1_min = 0.0;
  double perturbation_c = 0.0;
  double theorem2 = 0.0;
  std::optional<double> corollary1;
  double max_nd_gamma = 0.0;
  bool nd_nowhere = false;
  std::optional<Vector> w_star;
  std::optional<double> pbe_at_w_star;
};

struct AnalyzeOptions {
  /// Constant ratios of the simple-walk family, when known; enables the
  /// corollary1 bound in the report.
  std::optional<double> simple_walk_rho;
  std::optional<double> simple_walk_rho_hat;
  double bisect_tol = kBisectTolerance;
};

StabilityReport analyze(const MarkovChain& original,
                        const MarkovChain& perturbed,
                        const FeatureSetup& setup,
                        const AnalyzeOptions& options = {});

}  // namespace tdstab

#endif  // TDSTAB_STABILITY_HPP
