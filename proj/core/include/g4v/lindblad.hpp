#pragma once

#include <array>
#include <utility>
#include <vector>

#include "g4v/model.hpp"
#include "g4v/state.hpp"
#include "g4v/types.hpp"

namespace g4v {

/// Hamiltonian (rad/s) plus weighted jump operators of a master equation
/// in GKSL form: drho/dt = -i[H, rho] + sum_i g_i (L rho L^dag - {L^dag L, rho}/2).
struct LindbladSpec {
  ComplexMatrix hamiltonian;
  std::vector<std::pair<ComplexMatrix, double>> jump_ops;  // (L_i, rate >= 0)
};

/// The phonon-coupling master equation of the 4-level ground manifold:
/// H = (omega_a'/2)(|4><4| - |2><2| + |3><3| - |1><1|) with spin-conserving
/// jumps |2><4|, |4><2|, |1><3|, |3><1| at rates gamma(nbar+1), gamma nbar,
/// gamma(nbar+1), gamma nbar.
LindbladSpec phonon_spec(const ModelConstants& c);

/// Embeds a single-system spec on every factor of `shape` (identity on the
/// others): the N-system generator sum. All factor dims must match the spec.
LindbladSpec embed_spec(const LindbladSpec& spec, const SystemShape& shape);

/// Vectorized generator acting on row-major vec(rho), units 1/s.
struct Liouvillian {
  Eigen::Index dim;      // Hilbert-space dimension d
  ComplexMatrix matrix;  // d^2 x d^2
};

Liouvillian build_generator(const LindbladSpec& spec);
Liouvillian build_generator(const ModelConstants& c);

/// Row-major vectorization: vec(rho)[i*d + j] = rho(i, j), so that
/// vec(A rho B) = (A (x) B^T) vec(rho).
ComplexVector vectorize(const ComplexMatrix& rho);
ComplexMatrix devectorize(const ComplexVector& v);

/// Exponential of the generator over a fixed interval.
struct Propagator {
  ComplexMatrix matrix;  // d^2 x d^2, dimensionless
  double elapsed_s = 0.0;
  bool expm_fallback = false;  // true when the eigenvector matrix was too
                               // ill-conditioned and scaling-and-squaring
                               // was used instead

  DensityOperator apply(const DensityOperator& rho) const;
};

/// E(t) = V exp(diag(lambda_k t)) V^-1 from the eigendecomposition of the
/// generator. Decoupled index blocks of the generator are diagonalized
/// independently, which keeps well-separated rate scales exact. Falls back
/// to a scaling-and-squaring matrix exponential when the eigenvector matrix
/// condition number exceeds 1e12.
Propagator spectral_propagator(const Liouvillian& lv, double t_s);

/// Right-hand side L[rho] in matrix form.
ComplexMatrix lindblad_rhs(const LindbladSpec& spec, const ComplexMatrix& rho);

/// Classic fixed-step RK4 on drho/dt = L[rho]. Steps of size dt (the last
/// step is shortened to land on t exactly). Warns on stderr when dt exceeds
/// the recommended stability bound 0.01 / (sum of rates + |H| scale).
DensityOperator rk4_evolve(const DensityOperator& rho, const LindbladSpec& spec,
                           double t_s, double dt_s);
DensityOperator rk4_evolve(const DensityOperator& rho, const ModelConstants& c,
                           double t_s, double dt_s);

/// Discrete-time channel for one step dt: identity minus the first-order
/// drift (including the -i H part) plus one square-root jump per Lindblad
/// operator. Completeness holds up to the dropped (rate * dt)^2 terms:
/// ||sum M^dag M - I||_max <= c (gamma(2 nbar+1) dt)^2 with
/// c = (1 + (omega_a' / (gamma(2 nbar+1)))^2) / 4.
struct KrausSet {
  double dt_s;
  std::array<ComplexMatrix, 5> ops;

  /// ||sum_k M_k^dag M_k - I||_max, the completeness defect.
  double completeness_defect() const;
};

/// Throws std::invalid_argument when gamma(2 nbar + 1) dt >= 0.1; warns on
/// stderr above 0.01.
KrausSet kraus_set(const ModelConstants& c, double dt_s);

DensityOperator kraus_apply(const DensityOperator& rho, const KrausSet& ks);

/// n_steps applications. Trace drift is left observable, not renormalized.
DensityOperator kraus_evolve(const DensityOperator& rho, const KrausSet& ks,
                             long n_steps);

/// n-fold tensor power of a single-system propagator with row-major index
/// bookkeeping over shape [d]^n. Valid because the per-system generators
/// commute: exp(sum_k L_k t) factorizes. Throws when d^n exceeds `dim_cap`.
Propagator multi_spin_propagator(const Propagator& e, int n,
                                 Eigen::Index dim_cap = 64);

/// Applies a single-factor propagator on one tensor factor of rho, identity
/// on the rest.
DensityOperator apply_on_factor(const Propagator& e, std::size_t factor,
                                const DensityOperator& rho);

}  // namespace g4v
