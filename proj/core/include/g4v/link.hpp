#pragma once

#include <vector>

#include "g4v/lindblad.hpp"
#include "g4v/model.hpp"
#include "g4v/state.hpp"

namespace g4v {

enum class RailEncoding { single_rail, dual_rail };

/// Midpoint-swap link parameters. Lengths are end-to-end; each photon
/// travels L/2 to the midpoint station.
struct LinkConfig {
  double length_km = 0.0;
  double alpha_db_per_km = 0.2;
  double c_medium = 2.0e8;  // m/s
  RailEncoding encoding = RailEncoding::dual_rail;
  double dark_count_prob = 0.0;  // only 0 supported
  double visibility = 1.0;       // only 1 supported
};

/// Temporal milestones of one link attempt: photons reach the midpoint at
/// t_swap = L/(2 c_m); the heralding message reaches the end nodes at
/// t_herald = 2 t_swap.
struct Timeline {
  double t_emit_s = 0.0;
  double t_swap_s = 0.0;
  double t_herald_s = 0.0;

  static Timeline from(const LinkConfig& cfg);
};

/// Heralded two-spin state on shape [4,4] plus the probability that the
/// midpoint announces success, and when the state is being looked at.
struct HeraldedLinkState {
  DensityOperator rho;
  double success_prob;
  Timeline timeline;
  double evaluated_at_s;
};

/// Per-arm transmissivity over L/2 with the decibel fiber-attenuation
/// convention: eta_arm = 10^(-alpha_dB (L/2) / 10).
double arm_transmissivity(const LinkConfig& cfg);

/// Emitter output: spin levels {|1>,|2>} entangled with the photonic
/// occupation, equal amplitudes.
///   single rail: (|1>|0> + |2>|1>)/sqrt(2) on shape [4,2]
///   dual rail:   (|1>|0,1> + |2>|1,0>)/sqrt(2) on shape [4,4]
/// (dual-rail occupations are flat-indexed as 2*n_rail1 + n_rail2).
PureState spin_photon_source(RailEncoding encoding);

/// Heralding applied to a (possibly mixed) joint state of two emitters on
/// shape [4,P,4,P]: per-arm pure loss at `eta_arm`, balanced beamsplitter
/// interference of matching rails, photon-number-resolving detection.
/// `rho` is the canonical-pattern state (one click at detector c for single
/// rail; coincidence (c1,c2) for dual rail), normalized; `success_prob`
/// sums every accepted click pattern. The remaining patterns differ from
/// the canonical one by a local Pauli frame only.
struct HeraldOutcome {
  DensityOperator rho;  // shape [4,4]
  double success_prob;
};
HeraldOutcome herald_two_spins(const DensityOperator& joint,
                               RailEncoding encoding, double eta_arm);

/// Lossy midpoint swap of two fresh emitters, before any spin decoherence.
/// Rejects dark_count_prob != 0 or visibility != 1.
HeraldedLinkState heralded_swap(const LinkConfig& cfg);

enum class LinkStage { at_swap, at_herald };

/// Link state with phonon decoherence folded in: each spin decoheres for
/// t_swap while its photon flies (spin and photonic operations act on
/// disjoint factors, so the spin channel commutes with the heralding), and
/// for `at_herald` the entangled pair decoheres for a further t_swap while
/// the classical heralding message travels back.
HeraldedLinkState link_state_at(const LinkConfig& cfg, const ModelConstants& c,
                                LinkStage stage);

struct LinkSweepRow {
  double length_km;
  double hashing_at_swap;
  double hashing_at_herald;
  double success_prob;
};

/// Evaluates the link point-wise over a length grid at fixed temperature.
std::vector<LinkSweepRow> sweep_length(const LinkConfig& cfg_template,
                                       const ModelConstants& c,
                                       const std::vector<double>& lengths_km);

}  // namespace g4v
