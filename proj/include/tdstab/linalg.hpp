#ifndef TDSTAB_LINALG_HPP
#define TDSTAB_LINALG_HPP

#include <Eigen/Dense>

#include "tdstab/errors.hpp"
#include "tdstab/types.hpp"

namespace tdstab {

inline constexpr double kNdTolerance = 1e-10;

/// Symmetric part (M + M^T) / 2 of a square expression.
template <typename Derived>
auto symmetric_part(const Eigen::MatrixBase<Derived>& m) {
  return ((m + m.transpose()) * typename Derived::Scalar(0.5)).eval();
}

struct NdTest {
  bool is_nd = false;
  /// Smallest eigenvalue of the symmetric part of -A; positive iff A is
  /// negative definite with that margin.
  double min_sym_eig = 0.0;
};

/// Tests x^T A x < 0 for all x != 0 via the spectrum of (A + A^T)/2.
template <typename Derived>
NdTest is_negative_definite(const Eigen::MatrixBase<Derived>& a,
                            double nd_tolerance = kNdTolerance) {
  if (a.rows() != a.cols()) {
    throw ConfigError("is_negative_definite: matrix is not square");
  }
  Eigen::SelfAdjointEigenSolver<MatrixX<typename Derived::Scalar>> es(
      symmetric_part(a), Eigen::EigenvaluesOnly);
  const double margin = -static_cast<double>(es.eigenvalues().maxCoeff());
  return NdTest{margin > nd_tolerance, margin};
}

}  // namespace tdstab

#endif  // TDSTAB_LINALG_HPP
