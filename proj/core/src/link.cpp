#include "g4v/link.hpp"

#include <cmath>

#include "g4v/metrics.hpp"

namespace g4v {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Eigen::Index photonic_dim(RailEncoding enc) {
  return enc == RailEncoding::single_rail ? 2 : 4;
}

// Pure-loss Kraus pair on one bosonic mode, Fock cutoff 1.
std::vector<ComplexMatrix> mode_loss_kraus(double eta) {
  ComplexMatrix keep = ComplexMatrix::Zero(2, 2);
  keep(0, 0) = 1.0;
  keep(1, 1) = std::sqrt(eta);
  ComplexMatrix lose = ComplexMatrix::Zero(2, 2);
  lose(0, 1) = std::sqrt(1.0 - eta);
  return {keep, lose};
}

// Loss Kraus set on one photonic factor: a single mode for the single-rail
// encoding, the rail-1 (x) rail-2 pair for dual rail.
std::vector<ComplexMatrix> factor_loss_kraus(RailEncoding enc, double eta) {
  auto per_mode = mode_loss_kraus(eta);
  if (enc == RailEncoding::single_rail) return per_mode;
  std::vector<ComplexMatrix> out;
  for (const auto& k1 : per_mode)
    for (const auto& k2 : per_mode) out.push_back(kron(k1, k2));
  return out;
}

// Applies an operator-sum channel on one tensor factor.
DensityOperator apply_channel_on_factor(const std::vector<ComplexMatrix>& kraus,
                                        std::size_t factor,
                                        const DensityOperator& rho) {
  const auto& dims = rho.shape.dims();
  Eigen::Index pre = 1, post = 1;
  for (std::size_t f = 0; f < factor; ++f) pre *= dims[f];
  for (std::size_t f = factor + 1; f < dims.size(); ++f) post *= dims[f];

  ComplexMatrix out = ComplexMatrix::Zero(rho.matrix.rows(), rho.matrix.cols());
  for (const auto& k : kraus) {
    ComplexMatrix embedded =
        kron(kron(ComplexMatrix::Identity(pre, pre), k),
             ComplexMatrix::Identity(post, post));
    out += embedded * rho.matrix * embedded.adjoint();
  }
  return DensityOperator(rho.shape, std::move(out));
}

// Amplitude <1 photon at one output, 0 at the other | U_bs | n_a, n_b> of a
// balanced beamsplitter, indexed [2*n_a + n_b]. The (1,1) input bunches
// into |2,0> and |0,2| and never produces a single-photon coincidence.
//   a^dag -> (c^dag + d^dag)/sqrt(2),  b^dag -> (c^dag - d^dag)/sqrt(2)
std::array<Complex, 4> click_row(bool detector_c) {
  if (detector_c) return {0.0, kInvSqrt2, kInvSqrt2, 0.0};
  return {0.0, -kInvSqrt2, kInvSqrt2, 0.0};
}

// Accepted click patterns as measurement row-vectors over the combined
// photonic index (p_a * P + p_b). First entry is the canonical pattern.
std::vector<std::vector<Complex>> heralding_patterns(RailEncoding enc) {
  if (enc == RailEncoding::single_rail) {
    std::vector<std::vector<Complex>> out;
    for (bool det_c : {true, false}) {
      auto row = click_row(det_c);
      out.push_back({row[0], row[1], row[2], row[3]});
    }
    return out;
  }
  // Dual rail: rail pair 1 and rail pair 2 interfere on separate
  // beamsplitters; a Bell outcome is one click in each pair. Photonic
  // factor index is 2*n_rail1 + n_rail2 per side.
  std::vector<std::vector<Complex>> out;
  for (bool c1 : {true, false}) {
    for (bool c2 : {true, false}) {
      auto w1 = click_row(c1);
      auto w2 = click_row(c2);
      std::vector<Complex> w(16);
      for (int na1 = 0; na1 < 2; ++na1)
        for (int na2 = 0; na2 < 2; ++na2)
          for (int nb1 = 0; nb1 < 2; ++nb1)
            for (int nb2 = 0; nb2 < 2; ++nb2)
              w[(na1 * 2 + na2) * 4 + (nb1 * 2 + nb2)] =
                  w1[na1 * 2 + nb1] * w2[na2 * 2 + nb2];
      out.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace

Timeline Timeline::from(const LinkConfig& cfg) {
  Timeline t;
  t.t_emit_s = 0.0;
  t.t_swap_s = cfg.length_km * 1000.0 / (2.0 * cfg.c_medium);
  t.t_herald_s = 2.0 * t.t_swap_s;
  return t;
}

double arm_transmissivity(const LinkConfig& cfg) {
  if (cfg.length_km < 0.0)
    throw std::invalid_argument("arm_transmissivity: negative length");
  return std::pow(10.0, -cfg.alpha_db_per_km * (cfg.length_km / 2.0) / 10.0);
}

PureState spin_photon_source(RailEncoding encoding) {
  Eigen::Index p = photonic_dim(encoding);
  ComplexVector amps = ComplexVector::Zero(4 * p);
  if (encoding == RailEncoding::single_rail) {
    amps(0 * p + 0) = kInvSqrt2;  // |1>|0>
    amps(1 * p + 1) = kInvSqrt2;  // |2>|1>
  } else {
    amps(0 * p + 1) = kInvSqrt2;  // |1>|0,1>
    amps(1 * p + 2) = kInvSqrt2;  // |2>|1,0>
  }
  return PureState(SystemShape({4, p}), std::move(amps));
}

HeraldOutcome herald_two_spins(const DensityOperator& joint,
                               RailEncoding encoding, double eta_arm) {
  Eigen::Index p = photonic_dim(encoding);
  if (joint.shape.dims() != std::vector<Eigen::Index>({4, p, 4, p}))
    throw std::invalid_argument("herald_two_spins: expected shape [4,P,4,P]");
  if (eta_arm < 0.0 || eta_arm > 1.0)
    throw std::invalid_argument("herald_two_spins: eta_arm outside [0,1]");

  auto loss = factor_loss_kraus(encoding, eta_arm);
  DensityOperator lossy = apply_channel_on_factor(loss, 1, joint);
  lossy = apply_channel_on_factor(loss, 3, lossy);

  // Flat index of (spin_a, phot_a, spin_b, phot_b).
  auto idx = [p](Eigen::Index sa, Eigen::Index pa, Eigen::Index sb,
                 Eigen::Index pb) {
    return ((sa * p + pa) * 4 + sb) * p + pb;
  };

  double total_prob = 0.0;
  ComplexMatrix canonical;
  bool first = true;
  for (const auto& w : heralding_patterns(encoding)) {
    ComplexMatrix reduced = ComplexMatrix::Zero(16, 16);
    for (Eigen::Index sa = 0; sa < 4; ++sa)
      for (Eigen::Index sb = 0; sb < 4; ++sb)
        for (Eigen::Index sa2 = 0; sa2 < 4; ++sa2)
          for (Eigen::Index sb2 = 0; sb2 < 4; ++sb2) {
            Complex acc(0.0, 0.0);
            for (Eigen::Index pa = 0; pa < p; ++pa)
              for (Eigen::Index pb = 0; pb < p; ++pb)
                for (Eigen::Index pa2 = 0; pa2 < p; ++pa2)
                  for (Eigen::Index pb2 = 0; pb2 < p; ++pb2) {
                    Complex wl = w[pa * p + pb];
                    Complex wr = w[pa2 * p + pb2];
                    if (wl == Complex(0, 0) || wr == Complex(0, 0)) continue;
                    acc += wl * std::conj(wr) *
                           lossy.matrix(idx(sa, pa, sb, pb), idx(sa2, pa2, sb2, pb2));
                  }
            reduced(sa * 4 + sb, sa2 * 4 + sb2) = acc;
          }
    double prob = reduced.trace().real();
    total_prob += prob;
    if (first) {
      canonical = std::move(reduced);
      first = false;
    }
  }

  double canon_prob = canonical.trace().real();
  if (!(canon_prob > 0.0))
    throw std::domain_error("herald_two_spins: heralding pattern has zero probability");
  return HeraldOutcome{
      DensityOperator(SystemShape({4, 4}), canonical / canon_prob), total_prob};
}

HeraldedLinkState heralded_swap(const LinkConfig& cfg) {
  if (cfg.dark_count_prob != 0.0 || cfg.visibility != 1.0)
    throw std::invalid_argument(
        "heralded_swap: only dark_count_prob = 0 and visibility = 1 are supported");

  PureState src = spin_photon_source(cfg.encoding);
  DensityOperator joint = DensityOperator::from_pure(tensor(src, src));
  HeraldOutcome outcome = herald_two_spins(joint, cfg.encoding, arm_transmissivity(cfg));

  Timeline tl = Timeline::from(cfg);
  return HeraldedLinkState{std::move(outcome.rho), outcome.success_prob, tl,
                           tl.t_swap_s};
}

HeraldedLinkState link_state_at(const LinkConfig& cfg, const ModelConstants& c,
                                LinkStage stage) {
  HeraldedLinkState state = heralded_swap(cfg);
  double t1 = state.timeline.t_swap_s;

  if (t1 > 0.0) {
    Propagator e = spectral_propagator(build_generator(c), t1);
    // Photon-flight decoherence, commuted past the heralding.
    state.rho = apply_on_factor(e, 0, state.rho);
    state.rho = apply_on_factor(e, 1, state.rho);
    if (stage == LinkStage::at_herald)
      state.rho = multi_spin_propagator(e, 2).apply(state.rho);
  }
  state.evaluated_at_s = stage == LinkStage::at_herald ? state.timeline.t_herald_s
                                                       : state.timeline.t_swap_s;
  return state;
}

std::vector<LinkSweepRow> sweep_length(const LinkConfig& cfg_template,
                                       const ModelConstants& c,
                                       const std::vector<double>& lengths_km) {
  std::vector<LinkSweepRow> out;
  out.reserve(lengths_km.size());
  for (double l : lengths_km) {
    LinkConfig cfg = cfg_template;
    cfg.length_km = l;
    HeraldedLinkState at_swap = link_state_at(cfg, c, LinkStage::at_swap);
    HeraldedLinkState at_herald = link_state_at(cfg, c, LinkStage::at_herald);
    out.push_back({l, hashing_bound(at_swap.rho, 4, 4),
                   hashing_bound(at_herald.rho, 4, 4), at_swap.success_prob});
  }
  return out;
}

}  // namespace g4v
