#ifndef TDSTAB_TYPES_HPP
#define TDSTAB_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>

namespace tdstab {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// All shipped entry points work in double precision; the templated free
// functions below deduce the scalar from the expression they are given.
using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

}  // namespace tdstab

#endif  // TDSTAB_TYPES_HPP
