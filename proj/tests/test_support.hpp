#pragma once

#include <random>

#include "g4v/state.hpp"

namespace g4v::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed = 20260809) {
  return std::mt19937_64(seed);
}

inline ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols,
                             std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

// Random full-rank valid density operator.
inline DensityOperator random_density(SystemShape shape, std::mt19937_64& rng) {
  Eigen::Index d = shape.total_dim();
  ComplexMatrix a = ginibre(d, d, rng);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  return DensityOperator(std::move(shape), std::move(rho));
}

inline PureState random_pure(SystemShape shape, std::mt19937_64& rng) {
  ComplexVector v = ginibre(shape.total_dim(), 1, rng).col(0);
  return PureState::normalized(std::move(shape), std::move(v));
}

// Haar-ish random unitary via QR with phase fixing.
inline ComplexMatrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(d, d, rng));
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    Complex ph = r(i, i) / std::abs(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace g4v::testing
