#include "g4v/model.hpp"

#include <cmath>

#include "g4v/state.hpp"

namespace g4v {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Orbital basis order (e+, e-), spin basis order (up, down). The level
// basis permutes the product basis: level k maps to product index perm[k].
constexpr int kLevelToProduct[4] = {1, 2, 3, 0};

ComplexMatrix pauli_z() {
  ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

ComplexMatrix pauli_x() {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

// Sign convention with +i on the (e+, e-) / (up, down) entry.
ComplexMatrix pauli_y() {
  ComplexMatrix y(2, 2);
  y << 0, Complex(0, 1), Complex(0, -1), 0;
  return y;
}

// Re-expresses a product-basis operator in the level basis.
ComplexMatrix to_level_basis(const ComplexMatrix& product_op) {
  ComplexMatrix out(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out(i, j) = product_op(kLevelToProduct[i], kLevelToProduct[j]);
  return out;
}

}  // namespace

ComplexMatrix h_spin_orbit(const VacancyParams& p) {
  ComplexMatrix op = 0.5 * kTwoPi * p.lambda_so_hz * kron(pauli_z(), pauli_z());
  return to_level_basis(op);
}

ComplexMatrix h_jahn_teller(const VacancyParams& p) {
  ComplexMatrix orb = kTwoPi * (p.upsilon_x_hz * pauli_y() - p.upsilon_y_hz * pauli_x());
  return to_level_basis(kron(orb, ComplexMatrix::Identity(2, 2)));
}

ComplexMatrix h_zeeman(const VacancyParams& p) {
  double g = kTwoPi * p.gamma_e_hz_per_t;
  ComplexMatrix spin = 0.5 * g *
      (p.b_parallel_t * pauli_z() + p.b_x_t * pauli_x() + p.b_y_t * pauli_y());
  return to_level_basis(kron(ComplexMatrix::Identity(2, 2), spin));
}

namespace {

// Eigenpairs of the 2x2 spin block (1/2)[[a, b],[conj(b), -a]] in the
// (up, down) basis: the mostly-up vector (1, conj(b)/(a+r)) at +r/2 and the
// mostly-down vector (-b/(a+r), 1) at -r/2, with r = sqrt(a^2+|b|^2).
// Stated for a > 0; both branches here satisfy that (splitting dominated
// by the spin-orbit term).
struct SpinBranch {
  double energy_up, energy_down;        // +-r/2
  Complex mix_up_on_down, mix_down_on_up;  // unnormalized admixtures
};

SpinBranch solve_branch(double a, Complex b) {
  double r = std::sqrt(a * a + std::norm(b));
  SpinBranch out{};
  out.energy_up = 0.5 * r;
  out.energy_down = -0.5 * r;
  if (std::abs(b) == 0.0) {
    out.mix_up_on_down = 0.0;
    out.mix_down_on_up = 0.0;
  } else {
    out.mix_up_on_down = std::conj(b) / (a + r);
    out.mix_down_on_up = -b / (a + r);
  }
  return out;
}

}  // namespace

std::array<EigenLevel, 4> ground_manifold_eigensystem(const VacancyParams& p) {
  if (p.upsilon_x_hz != 0.0 || p.upsilon_y_hz != 0.0) {
    // Orbital distortion mixes the orbital branches; no closed form here.
    ComplexMatrix h = h_spin_orbit(p) + h_jahn_teller(p) + h_zeeman(p);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);

    // Assign eigenvectors to level slots by dominant overlap.
    std::array<EigenLevel, 4> out;
    std::array<bool, 4> used{};
    for (int lvl = 0; lvl < 4; ++lvl) {
      int best = -1;
      double best_w = -1.0;
      for (int k = 0; k < 4; ++k) {
        if (used[k]) continue;
        double w = std::norm(es.eigenvectors()(lvl, k));
        if (w > best_w) {
          best_w = w;
          best = k;
        }
      }
      used[best] = true;
      out[lvl] = EigenLevel{es.eigenvalues()(best), es.eigenvectors().col(best)};
    }
    return out;
  }

  double lam = kTwoPi * p.lambda_so_hz;
  double g = kTwoPi * p.gamma_e_hz_per_t;
  double bz = g * p.b_parallel_t;
  Complex bplus = g * Complex(p.b_x_t, p.b_y_t);

  SpinBranch eplus = solve_branch(lam + bz, bplus);   // orbital e+
  SpinBranch eminus = solve_branch(lam - bz, -bplus); // orbital e-; SO sign flips

  // On the e- branch the spin block is (1/2)[[bz-lam, b],[conj(b), lam-bz]]
  // = -(1/2)[[lam-bz, -b],[-conj(b), bz-lam]], so the mostly-up state is the
  // *low* eigenvalue there. solve_branch(lam-bz, -bplus) hands back exactly
  // those vectors with energies negated below.
  std::array<EigenLevel, 4> out;
  auto level_vector = [](int orbital, Complex amp_up, Complex amp_down) {
    // Level basis components: |1>=(e+,dn), |2>=(e-,up), |3>=(e-,dn), |4>=(e+,up).
    ComplexVector v = ComplexVector::Zero(4);
    if (orbital == 0) {  // e+
      v(3) = amp_up;
      v(0) = amp_down;
    } else {  // e-
      v(1) = amp_up;
      v(2) = amp_down;
    }
    return ComplexVector(v / v.norm());
  };

  // |1>: e+ mostly-down; |4>: e+ mostly-up.
  out[0] = EigenLevel{eplus.energy_down,
                      level_vector(0, eplus.mix_down_on_up, 1.0)};
  out[3] = EigenLevel{eplus.energy_up,
                      level_vector(0, 1.0, eplus.mix_up_on_down)};
  // |2>: e- mostly-up (low); |3>: e- mostly-down (high).
  out[1] = EigenLevel{-eminus.energy_up,
                      level_vector(1, 1.0, eminus.mix_up_on_down)};
  out[2] = EigenLevel{-eminus.energy_down,
                      level_vector(1, eminus.mix_down_on_up, 1.0)};
  return out;
}

double thermal_occupation(double delta_hz, double temperature_k) {
  if (temperature_k <= 0.0)
    throw std::domain_error("thermal_occupation: temperature must be > 0");
  if (delta_hz <= 0.0)
    throw std::domain_error("thermal_occupation: delta must be > 0");
  double x = kPlanckJs * delta_hz / (kBoltzmannJK * temperature_k);
  // e^-x / (1 - e^-x) == 1 / (e^x - 1)
  return 1.0 / std::expm1(x);
}

double coupling_rate(double g0chi0_s2, double delta_hz) {
  if (g0chi0_s2 < 0.0)
    throw std::domain_error("coupling_rate: g0chi0 must be >= 0");
  return kTwoPi * g0chi0_s2 * delta_hz * delta_hz * delta_hz;
}

double g0chi0_for_rate(double gamma_s_inv, double delta_hz) {
  if (gamma_s_inv < 0.0)
    throw std::domain_error("g0chi0_for_rate: gamma must be >= 0");
  if (delta_hz <= 0.0)
    throw std::domain_error("g0chi0_for_rate: delta must be > 0");
  return gamma_s_inv / (kTwoPi * delta_hz * delta_hz * delta_hz);
}

ModelConstants ModelConstants::make(double delta_hz, double temperature_k,
                                    double g0chi0_s2,
                                    std::optional<double> omega_a_prime_rad_s) {
  ModelConstants c{};
  c.delta_hz = delta_hz;
  c.temperature_k = temperature_k;
  c.g0chi0_s2 = g0chi0_s2;
  c.nbar = thermal_occupation(delta_hz, temperature_k);
  c.gamma_s_inv = coupling_rate(g0chi0_s2, delta_hz);
  c.omega_a_prime_rad_s = omega_a_prime_rad_s.value_or(kTwoPi * delta_hz);
  return c;
}

ModelConstants ModelConstants::from_rate(double delta_hz, double temperature_k,
                                         double gamma_s_inv,
                                         std::optional<double> omega_a_prime_rad_s) {
  return make(delta_hz, temperature_k, g0chi0_for_rate(gamma_s_inv, delta_hz),
              omega_a_prime_rad_s);
}

ModelConstants ModelConstants::zero_temperature(
    double delta_hz, double g0chi0_s2, std::optional<double> omega_a_prime_rad_s) {
  ModelConstants c{};
  c.delta_hz = delta_hz;
  c.temperature_k = 0.0;
  c.g0chi0_s2 = g0chi0_s2;
  c.nbar = 0.0;
  c.gamma_s_inv = coupling_rate(g0chi0_s2, delta_hz);
  c.omega_a_prime_rad_s = omega_a_prime_rad_s.value_or(kTwoPi * delta_hz);
  return c;
}

}  // namespace g4v
