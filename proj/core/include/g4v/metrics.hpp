#pragma once

#include <optional>
#include <vector>

#include "g4v/model.hpp"
#include "g4v/state.hpp"

namespace g4v {

/// Matrix element <bra| rho |ket> (0-based level indices).
Complex coherence_element(const DensityOperator& rho, Eigen::Index bra,
                          Eigen::Index ket);

/// Hashing bound min[S(rho_A), S(rho_B)] - S(rho_AB) in ebits per copy, a
/// lower bound on two-way distillable entanglement. Negative values are
/// reported as-is (callers may clamp for rate calculations).
double hashing_bound(const DensityOperator& rho_ab, Eigen::Index dim_a,
                     Eigen::Index dim_b);

/// Sampled decay trace: strictly increasing times, finite values.
struct DecayCurve {
  std::vector<double> times_s;
  std::vector<double> values;

  DecayCurve(std::vector<double> times, std::vector<double> vals);
};

struct FitResult {
  double tau_s;         // +infinity signals a flat (non-decaying) curve
  double amplitude;
  double residual_rms;  // in linear space
};

/// Log-linear least-squares fit of v(t) = A exp(-t / tau). When
/// `amplitude_fixed` is given only the rate is fitted. Samples below
/// floor_fraction * v(0) are excluded from the log-space fit; a
/// non-positive leading sample or fewer than 3 usable samples is an error
/// instructing the caller to truncate the curve.
FitResult fit_exponential(const DecayCurve& curve,
                          std::optional<double> amplitude_fixed = {},
                          double floor_fraction = 1e-6);

struct ScanPoint {
  double temperature_k;
  FitResult fit;
};

/// Evolves `initial` under each parameter set with the spectral backend,
/// samples the decay observable on n_samples points over [0, horizon], and
/// fits its exponential decay constant. The observable is |<1|rho|2>| with
/// amplitude 0.5 for a single spin, and the hashing bound with amplitude
/// 1.0 for a spin pair.
std::vector<ScanPoint> decoherence_scan(const std::vector<ModelConstants>& grid,
                                        const DensityOperator& initial,
                                        double horizon_s, int n_samples);

}  // namespace g4v
