#pragma once

#include <vector>

#include "g4v/types.hpp"

namespace g4v {

/// Ordered list of subsystem dimensions of a tensor-product space,
/// e.g. {4} for a single spin, {4,4} for two spins, {4,2,4,2} for two
/// spin-photon pairs. Flat basis indices are row-major with the leftmost
/// factor most significant.
class SystemShape {
 public:
  explicit SystemShape(std::vector<Eigen::Index> dims);
  static SystemShape single(Eigen::Index dim) { return SystemShape({dim}); }

  Eigen::Index total_dim() const { return total_; }
  std::size_t factor_count() const { return dims_.size(); }
  Eigen::Index dim(std::size_t factor) const { return dims_.at(factor); }
  const std::vector<Eigen::Index>& dims() const { return dims_; }

  /// Shape of the joint space `this (x) other`.
  SystemShape concat(const SystemShape& other) const;

  bool operator==(const SystemShape& other) const { return dims_ == other.dims_; }
  bool operator!=(const SystemShape& other) const { return !(*this == other); }

 private:
  std::vector<Eigen::Index> dims_;
  Eigen::Index total_ = 1;
};

/// Unit-norm state vector over a labeled tensor-product space.
struct PureState {
  SystemShape shape;
  ComplexVector amplitudes;

  /// Requires |norm - 1| <= 1e-12; use `normalized` for raw amplitude data.
  PureState(SystemShape shape_, ComplexVector amplitudes_);
  static PureState normalized(SystemShape shape_, ComplexVector amplitudes_);
};

/// Density operator over a labeled tensor-product space. Construction only
/// checks dimensional consistency; physical validity (Hermiticity, unit
/// trace, positivity) is probed separately with `validate`.
struct DensityOperator {
  SystemShape shape;
  ComplexMatrix matrix;

  DensityOperator(SystemShape shape_, ComplexMatrix matrix_);
  static DensityOperator from_pure(const PureState& psi);
  static DensityOperator maximally_mixed(SystemShape shape_);
};

/// Validity diagnostics of a density operator.
struct ValidityReport {
  double hermiticity_defect;  // max |rho - rho^dagger| entry
  double trace_defect;        // |Tr(rho) - 1|
  double min_eigenvalue;      // smallest eigenvalue of the Hermitian part

  bool ok(double tol_herm = kHermTol, double tol_trace = kTraceTol,
          double tol_eig = kEigTol) const {
    return hermiticity_defect < tol_herm && trace_defect < tol_trace &&
           min_eigenvalue > -tol_eig;
  }
};

ValidityReport validate(const DensityOperator& rho);

/// Kronecker product with row-major index convention: the left operand's
/// indices are most significant.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

PureState tensor(const PureState& a, const PureState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Reduced state on the kept factors (ascending original order preserved).
/// Throws std::invalid_argument for an empty set or out-of-range indices.
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::size_t>& keep);

/// Von Neumann entropy in bits. Eigenvalues in [-1e-9, 0) are clipped to
/// zero and values below 1e-12 are treated as exact zeros; anything more
/// negative than -1e-9 is a domain error.
double von_neumann_entropy(const DensityOperator& rho);

/// Uhlmann fidelity F(rho1, rho2) = Tr(sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2,
/// with the pure-state overlap fast path when either argument is rank one.
double fidelity(const DensityOperator& rho1, const DensityOperator& rho2);
double fidelity(const DensityOperator& rho, const PureState& psi);

/// Trace distance (1/2)||rho1 - rho2||_1.
double trace_distance(const DensityOperator& rho1, const DensityOperator& rho2);

}  // namespace g4v
