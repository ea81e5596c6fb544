#pragma once

#include <array>
#include <optional>

#include "g4v/types.hpp"

namespace g4v {

// 2018 CODATA SI values.
inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kBoltzmannJK = 1.380649e-23;
inline constexpr double kBohrMagnetonJT = 9.2740100783e-24;
// Electron gyromagnetic factor 2 mu_B / h, stated as an ordinary frequency
// per tesla so that gamma_e * B combines with the other Hz-valued energies.
inline constexpr double kGyromagneticHzPerT = 2.0 * kBohrMagnetonJT / kPlanckJs;

/// Ground-manifold interaction strengths. All energies are ordinary
/// frequencies (Hz); fields are tesla.
struct VacancyParams {
  double lambda_so_hz = 0.0;  // spin-orbit coupling strength
  double upsilon_x_hz = 0.0;  // orbital-distortion energy, x
  double upsilon_y_hz = 0.0;  // orbital-distortion energy, y
  double b_parallel_t = 0.0;  // field along the defect symmetry axis
  double b_x_t = 0.0;         // perpendicular field components
  double b_y_t = 0.0;
  double gamma_e_hz_per_t = kGyromagneticHzPerT;
};

// Ground-manifold interaction Hamiltonians as 4x4 matrices in angular
// frequency units (rad/s), written in the energy-level basis
//   |1> = |e+,down>, |2> = |e-,up>, |3> = |e-,down>, |4> = |e+,up>
// (code indices 0..3). Levels {1,2} sit at -lambda_so/2 and {3,4} at
// +lambda_so/2 for the pure spin-orbit term.
ComplexMatrix h_spin_orbit(const VacancyParams& p);
ComplexMatrix h_jahn_teller(const VacancyParams& p);
ComplexMatrix h_zeeman(const VacancyParams& p);

struct EigenLevel {
  double value_rad_s;    // energy as angular frequency
  ComplexVector vector;  // normalized, in the level basis above
};

/// Eigenbasis of the ground manifold under spin-orbit plus Zeeman terms.
/// Returned in level order (the k-th entry is the state adiabatically
/// connected to |k+1>). Uses per-orbital-branch closed forms when the
/// orbital-distortion energies vanish, otherwise dense diagonalization of
/// the full 4x4 sum.
std::array<EigenLevel, 4> ground_manifold_eigensystem(const VacancyParams& p);

/// Bose-Einstein occupation of the phonon mode at splitting `delta_hz`,
/// with thermal energy h * delta. Throws std::domain_error for
/// temperature <= 0 or delta <= 0; the T -> 0 limit is the constant 0.
double thermal_occupation(double delta_hz, double temperature_k);

/// Phonon coupling rate gamma = 2 pi g0chi0 delta^3 in 1/s.
double coupling_rate(double g0chi0_s2, double delta_hz);

/// Inverts coupling_rate: the g0chi0 that yields `gamma_s_inv` at `delta_hz`.
double g0chi0_for_rate(double gamma_s_inv, double delta_hz);

/// Physical parameter bundle feeding every Lindblad generator.
struct ModelConstants {
  double delta_hz;            // ground-manifold splitting, ordinary frequency
  double temperature_k;       // phonon bath temperature
  double g0chi0_s2;           // density-of-modes x coupling proportionality
  double nbar;                // thermal phonon occupation at (delta, T)
  double gamma_s_inv;         // 2 pi g0chi0 delta^3
  double omega_a_prime_rad_s; // shifted oscillation frequency of the coherences

  /// omega_a_prime defaults to 2 pi delta (temperature and Lamb shifts zero).
  static ModelConstants make(double delta_hz, double temperature_k,
                             double g0chi0_s2,
                             std::optional<double> omega_a_prime_rad_s = {});
  /// Same, but calibrated from a target rate gamma instead of g0chi0.
  static ModelConstants from_rate(double delta_hz, double temperature_k,
                                  double gamma_s_inv,
                                  std::optional<double> omega_a_prime_rad_s = {});
  /// T -> 0 limit: nbar = 0 without evaluating the Bose-Einstein form.
  static ModelConstants zero_temperature(double delta_hz, double g0chi0_s2,
                                         std::optional<double> omega_a_prime_rad_s = {});
};

}  // namespace g4v
