#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "g4v/lindblad.hpp"
#include "g4v/metrics.hpp"
#include "test_support.hpp"

using namespace g4v;
using namespace g4v::testing;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Moderate-rate constants with the oscillation frequency pinned to the
// dissipative scale so that all three backends resolve the same dynamics.
ModelConstants test_constants(double omega_scale = 1.0) {
  ModelConstants c = ModelConstants::from_rate(50e9, 4.0, 3e3);
  double lam = c.gamma_s_inv * (2.0 * c.nbar + 1.0);
  return ModelConstants::from_rate(50e9, 4.0, 3e3, omega_scale * lam);
}

DensityOperator plus_state() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(1) = kInvSqrt2;
  return DensityOperator::from_pure(PureState(SystemShape::single(4), v));
}

DensityOperator bell_state() {
  ComplexVector v = ComplexVector::Zero(16);
  v(1) = v(4) = kInvSqrt2;
  return DensityOperator::from_pure(PureState(SystemShape({4, 4}), v));
}

}  // namespace

TEST_CASE("generator entries reproduce the element-wise rate equations") {
  ModelConstants c = ModelConstants::from_rate(50e9, 4.0, 3e3, 7e3);
  double g = c.gamma_s_inv, n = c.nbar, w = c.omega_a_prime_rad_s;
  Liouvillian lv = build_generator(c);
  REQUIRE(lv.matrix.rows() == 16);

  // Populations of the {|1>,|3>} pair: flat (0,0) = 0, (2,2) = 10.
  CHECK(std::abs(lv.matrix(0, 0) - Complex(-g * n, 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(0, 10) - Complex(g * (n + 1), 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(10, 0) - Complex(g * n, 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(10, 10) - Complex(-g * (n + 1), 0)) < 1e-9);
  // Same structure for {|2>,|4>}: flat (1,1) = 5, (3,3) = 15.
  CHECK(std::abs(lv.matrix(5, 5) - Complex(-g * n, 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(5, 15) - Complex(g * (n + 1), 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(15, 5) - Complex(g * n, 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(15, 15) - Complex(-g * (n + 1), 0)) < 1e-9);

  // Ground-pair coherence rho_12 (flat 1) decays at gamma nbar, no phase;
  // excited-pair coherence rho_34 (flat 11) at gamma (nbar + 1).
  CHECK(std::abs(lv.matrix(1, 1) - Complex(-g * n, 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(4, 4) - Complex(-g * n, 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(11, 11) - Complex(-g * (n + 1), 0)) < 1e-9);
  CHECK(std::abs(lv.matrix(14, 14) - Complex(-g * (n + 1), 0)) < 1e-9);

  // Pair coherences rho_13, rho_14, rho_23, rho_24 (flats 2, 3, 6, 7):
  // -(gamma(2n+1)/2) + i omega_a'; conjugates on flats 8, 12, 9, 13.
  Complex pair(-0.5 * g * (2 * n + 1), w);
  for (Eigen::Index f : {2, 3, 6, 7})
    CHECK(std::abs(lv.matrix(f, f) - pair) < 1e-9);
  for (Eigen::Index f : {8, 12, 9, 13})
    CHECK(std::abs(lv.matrix(f, f) - std::conj(pair)) < 1e-9);

  // Off the listed couplings the generator vanishes.
  double offsum = 0.0;
  for (Eigen::Index i = 0; i < 16; ++i)
    for (Eigen::Index j = 0; j < 16; ++j) {
      bool listed = i == j || (i == 0 && j == 10) || (i == 10 && j == 0) ||
                    (i == 5 && j == 15) || (i == 15 && j == 5);
      if (!listed) offsum += std::abs(lv.matrix(i, j));
    }
  CHECK(offsum == 0.0);
}

TEST_CASE("closed-system generator is the pure commutator") {
  ModelConstants c = ModelConstants::from_rate(50e9, 4.0, 0.0, 5e3);
  Liouvillian lv = build_generator(c);
  // Diagonal with level-pair phase differences i(w_a - w_b) in {0, +-i w}.
  for (Eigen::Index i = 0; i < 16; ++i) {
    for (Eigen::Index j = 0; j < 16; ++j) {
      if (i != j) CHECK(lv.matrix(i, j) == Complex(0, 0));
    }
    CHECK(lv.matrix(i, i).real() == 0.0);
  }
  CHECK(std::abs(lv.matrix(2, 2) - Complex(0, 5e3)) < 1e-12);   // rho_13
  CHECK(std::abs(lv.matrix(8, 8) - Complex(0, -5e3)) < 1e-12);  // rho_31
  CHECK(lv.matrix(1, 1) == Complex(0, 0));                      // rho_12 degenerate
}

TEST_CASE("generator is trace preserving") {
  auto rng = make_rng(41);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  for (int it = 0; it < 5; ++it) {
    ModelConstants c = ModelConstants::from_rate(50e9, u(rng), 1e4 * u(rng));
    Liouvillian lv = build_generator(c);
    ComplexVector vec_id = vectorize(ComplexMatrix::Identity(4, 4));
    CHECK((vec_id.adjoint() * lv.matrix).cwiseAbs().maxCoeff() <
          1e-10 * c.gamma_s_inv);
  }
}

TEST_CASE("vectorize uses row-major order and round-trips") {
  ComplexMatrix rho(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) rho(i, j) = Complex(double(i), double(j));
  ComplexVector v = vectorize(rho);
  CHECK(v(1) == rho(0, 1));  // rho_12 at flat position 2 (1-indexed)
  CHECK(v(4) == rho(1, 0));

  ComplexVector vid = vectorize(ComplexMatrix::Identity(4, 4) / 4.0);
  for (Eigen::Index f : {0, 5, 10, 15}) CHECK(vid(f) == Complex(0.25, 0));
  CHECK(vid.cwiseAbs().sum() == doctest::Approx(1.0));

  auto rng = make_rng(43);
  ComplexMatrix r = ginibre(5, 5, rng);
  CHECK(max_abs_diff(devectorize(vectorize(r)), r) == 0.0);

  ComplexVector bad(5);
  CHECK_THROWS_AS(devectorize(bad), std::invalid_argument);
}

TEST_CASE("spectral propagator: identity at t=0 and semigroup property") {
  ModelConstants c = test_constants();
  Liouvillian lv = build_generator(c);
  Propagator e0 = spectral_propagator(lv, 0.0);
  CHECK(max_abs_diff(e0.matrix, ComplexMatrix::Identity(16, 16)) < 1e-12);
  CHECK_FALSE(e0.expm_fallback);

  double t1 = 0.7 / (c.gamma_s_inv * (2 * c.nbar + 1));
  double t2 = 1.9 / (c.gamma_s_inv * (2 * c.nbar + 1));
  Propagator e1 = spectral_propagator(lv, t1);
  Propagator e2 = spectral_propagator(lv, t2);
  Propagator e12 = spectral_propagator(lv, t1 + t2);
  CHECK(max_abs_diff(e1.matrix * e2.matrix, e12.matrix) < 1e-9);
}

TEST_CASE("spectral propagator reproduces the analytic coherence decay") {
  ModelConstants c = test_constants();
  Liouvillian lv = build_generator(c);
  DensityOperator rho0 = plus_state();
  double gn = c.gamma_s_inv * c.nbar;
  for (double t : {0.0, 0.3 / gn, 1.0 / gn, 4.0 / gn}) {
    DensityOperator rho = spectral_propagator(lv, t).apply(rho0);
    double expect = 0.5 * std::exp(-gn * t);
    CHECK(std::abs(coherence_element(rho, 0, 1)) ==
          doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("population started in |3> relaxes to nbar/(2 nbar + 1)") {
  ModelConstants c = test_constants();
  Liouvillian lv = build_generator(c);
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(2, 2) = 1.0;
  DensityOperator rho0(SystemShape::single(4), m);
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  double steady = c.nbar / (2 * c.nbar + 1);
  for (double t : {0.1 / lam, 1.0 / lam, 10.0 / lam}) {
    DensityOperator rho = spectral_propagator(lv, t).apply(rho0);
    double expect = steady + (1.0 - steady) * std::exp(-lam * t);
    CHECK(rho.matrix(2, 2).real() == doctest::Approx(expect).epsilon(1e-8));
    // Population moved 3 -> 1 only.
    CHECK(rho.matrix(2, 2).real() + rho.matrix(0, 0).real() ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("spectral propagator maps valid states to valid states") {
  auto rng = make_rng(47);
  std::uniform_real_distribution<double> ut(0.1, 4.0), ul(0.0, 3.0);
  for (int it = 0; it < 20; ++it) {
    ModelConstants c = ModelConstants::from_rate(50e9, ut(rng), 2e3 * ut(rng));
    double lam = c.gamma_s_inv * (2 * c.nbar + 1);
    Propagator e = spectral_propagator(build_generator(c), ul(rng) / lam);
    DensityOperator rho = random_density(SystemShape::single(4), rng);
    ValidityReport rep = validate(e.apply(rho));
    CHECK(rep.hermiticity_defect < 1e-10);
    CHECK(rep.trace_defect < 1e-10);
    CHECK(rep.min_eigenvalue > -1e-9);
  }
}

TEST_CASE("pairwise populations are constants of motion") {
  ModelConstants c = test_constants();
  Liouvillian lv = build_generator(c);
  auto rng = make_rng(53);
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  for (int it = 0; it < 10; ++it) {
    DensityOperator rho0 = random_density(SystemShape::single(4), rng);
    double s13 = (rho0.matrix(0, 0) + rho0.matrix(2, 2)).real();
    double s24 = (rho0.matrix(1, 1) + rho0.matrix(3, 3)).real();
    DensityOperator rho = spectral_propagator(lv, 1.3 / lam).apply(rho0);
    CHECK(std::abs((rho.matrix(0, 0) + rho.matrix(2, 2)).real() - s13) < 1e-10);
    CHECK(std::abs((rho.matrix(1, 1) + rho.matrix(3, 3)).real() - s24) < 1e-10);
  }
}

TEST_CASE("defective generator falls back to scaling-and-squaring") {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 1) = 1.0;  // Jordan block; no eigenvector basis
  Liouvillian lv{2, m};
  Propagator e = spectral_propagator(lv, 0.5);
  CHECK(e.expm_fallback);
  ComplexMatrix expect = ComplexMatrix::Identity(4, 4);
  expect(0, 1) = 0.5;
  CHECK(max_abs_diff(e.matrix, expect) < 1e-12);
}

TEST_CASE("RK4 matches the exact phase evolution of a closed system") {
  ModelConstants c = ModelConstants::from_rate(50e9, 4.0, 0.0, 2e3);
  auto rng = make_rng(59);
  DensityOperator rho0 = random_density(SystemShape::single(4), rng);
  double t = 1e-3;
  DensityOperator rk = rk4_evolve(rho0, c, t, 1e-6);
  DensityOperator sp = spectral_propagator(build_generator(c), t).apply(rho0);
  CHECK(trace_distance(rk, sp) < 1e-12);
}

TEST_CASE("RK4 agrees with the spectral backend at the documented step size") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  double dt = 1e-3 / lam;
  auto rng = make_rng(61);
  DensityOperator rho0 = random_density(SystemShape::single(4), rng);
  double t = 1.0 / lam;
  DensityOperator rk = rk4_evolve(rho0, c, t, dt);
  DensityOperator sp = spectral_propagator(build_generator(c), t).apply(rho0);
  CHECK(trace_distance(rk, sp) < 1e-8);
}

TEST_CASE("RK4 converges at fourth order") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  auto rng = make_rng(67);
  DensityOperator rho0 = random_density(SystemShape::single(4), rng);
  double t = 0.5 / lam;
  DensityOperator exact = spectral_propagator(build_generator(c), t).apply(rho0);

  double dt = 0.05 / lam;
  double e1 = trace_distance(rk4_evolve(rho0, c, t, dt), exact);
  double e2 = trace_distance(rk4_evolve(rho0, c, t, dt / 2), exact);
  CHECK(e1 / e2 > 10.0);
  CHECK(e1 / e2 < 24.0);
}

TEST_CASE("Kraus set: dt = 0 degenerates to the identity channel") {
  ModelConstants c = test_constants();
  KrausSet ks = kraus_set(c, 0.0);
  CHECK(max_abs_diff(ks.ops[0], ComplexMatrix::Identity(4, 4)) == 0.0);
  for (int k = 1; k < 5; ++k) CHECK(ks.ops[k].cwiseAbs().maxCoeff() == 0.0);
  CHECK(ks.completeness_defect() < 1e-15);
}

TEST_CASE("Kraus completeness defect is quadratic with the documented constant") {
  ModelConstants c = test_constants(3.0);  // omega_a' = 3 lambda
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  double w = c.omega_a_prime_rad_s;
  double cbound = 0.25 * (1.0 + (w / lam) * (w / lam));
  // Exact defect: max diagonal of (K^2 + H^2) dt^2.
  double exact_coeff =
      0.25 * (std::pow(c.gamma_s_inv * (c.nbar + 1), 2) + w * w);
  for (double x : {1e-3, 1e-2, 5e-2}) {
    double dt = x / lam;
    double defect = kraus_set(c, dt).completeness_defect();
    CHECK(defect == doctest::Approx(exact_coeff * dt * dt).epsilon(1e-10));
    CHECK(defect <= cbound * (lam * dt) * (lam * dt) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(kraus_set(c, 0.2 / lam), std::invalid_argument);
}

TEST_CASE("single Kraus step matches the spectral propagator to O(dt^2)") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  Liouvillian lv = build_generator(c);
  DensityOperator rho0 = plus_state();

  double dt_coarse = 8e-3 / lam, dt_fine = 1e-3 / lam;
  double e_coarse = trace_distance(kraus_apply(rho0, kraus_set(c, dt_coarse)),
                                   spectral_propagator(lv, dt_coarse).apply(rho0));
  double e_fine = trace_distance(kraus_apply(rho0, kraus_set(c, dt_fine)),
                                 spectral_propagator(lv, dt_fine).apply(rho0));
  // dt shrank 8x; a second-order local error shrinks ~64x.
  CHECK(e_coarse / e_fine > 40.0);
  CHECK(e_coarse / e_fine < 100.0);
}

TEST_CASE("Kraus evolution: identity at zero steps, O(dt) global error") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  Liouvillian lv = build_generator(c);
  auto rng = make_rng(71);
  DensityOperator rho0 = random_density(SystemShape::single(4), rng);

  CHECK(trace_distance(kraus_evolve(rho0, kraus_set(c, 1e-3 / lam), 0), rho0) == 0.0);

  double t = 0.5 / lam;
  DensityOperator exact = spectral_propagator(lv, t).apply(rho0);
  long n1 = 250, n2 = 1000;
  double g1 = trace_distance(kraus_evolve(rho0, kraus_set(c, t / n1), n1), exact);
  double g2 = trace_distance(kraus_evolve(rho0, kraus_set(c, t / n2), n2), exact);
  // dt shrank 4x; first-order global error shrinks ~4x.
  CHECK(g1 / g2 > 3.0);
  CHECK(g1 / g2 < 5.5);
}

TEST_CASE("Kraus trace drift over 1e4 steps stays within the defect bound") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  double dt = 2e-3 / lam;
  KrausSet ks = kraus_set(c, dt);
  DensityOperator rho = kraus_evolve(plus_state(), ks, 10000);
  ValidityReport rep = validate(rho);
  CHECK(rep.trace_defect <= 10000 * ks.completeness_defect() * 1.05);
  CHECK(rep.hermiticity_defect < 1e-12);
  CHECK(rep.min_eigenvalue > -1e-9);
}

TEST_CASE("two-spin propagator factorizes on product states") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  Propagator e = spectral_propagator(build_generator(c), 0.8 / lam);
  Propagator e2 = multi_spin_propagator(e, 2);

  auto rng = make_rng(73);
  DensityOperator a = random_density(SystemShape::single(4), rng);
  DensityOperator b = random_density(SystemShape::single(4), rng);
  DensityOperator joint = e2.apply(tensor(a, b));
  DensityOperator expect = tensor(e.apply(a), e.apply(b));
  CHECK(max_abs_diff(joint.matrix, expect.matrix) < 1e-12);

  Propagator e1 = multi_spin_propagator(e, 1);
  CHECK(max_abs_diff(e1.matrix, e.matrix) == 0.0);

  CHECK_THROWS_AS(multi_spin_propagator(e, 4), std::invalid_argument);
}

TEST_CASE("two-spin propagator matches RK4 of the composite generator") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  double t = 0.6 / lam;
  Propagator pair = multi_spin_propagator(
      spectral_propagator(build_generator(c), t), 2);
  DensityOperator evolved = pair.apply(bell_state());

  // Independent oracle: integrate the 16x16-state composite generator.
  LindbladSpec composite = embed_spec(phonon_spec(c), SystemShape({4, 4}));
  DensityOperator oracle = rk4_evolve(bell_state(), composite, t, 1e-3 / lam);
  CHECK(trace_distance(evolved, oracle) < 1e-8);
}

TEST_CASE("three-spin composite stays within the default cap") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  Propagator e = spectral_propagator(build_generator(c), 0.5 / lam);
  Propagator e3 = multi_spin_propagator(e, 3);
  CHECK(e3.matrix.rows() == 4096);

  auto rng = make_rng(79);
  DensityOperator a = random_density(SystemShape::single(4), rng);
  DensityOperator b = random_density(SystemShape::single(4), rng);
  DensityOperator d = random_density(SystemShape::single(4), rng);
  DensityOperator joint = e3.apply(tensor(tensor(a, b), d));
  DensityOperator expect = tensor(tensor(e.apply(a), e.apply(b)), e.apply(d));
  CHECK(max_abs_diff(joint.matrix, expect.matrix) < 1e-12);
}

TEST_CASE("apply_on_factor acts locally and leaves other marginals alone") {
  ModelConstants c = test_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  Propagator e = spectral_propagator(build_generator(c), 1.1 / lam);
  Propagator id = spectral_propagator(build_generator(c), 0.0);

  auto rng = make_rng(83);
  DensityOperator spin = random_density(SystemShape::single(4), rng);
  DensityOperator photon = random_density(SystemShape::single(2), rng);
  DensityOperator joint = tensor(spin, photon);

  CHECK(max_abs_diff(apply_on_factor(id, 0, joint).matrix, joint.matrix) < 1e-12);

  DensityOperator moved = apply_on_factor(e, 0, joint);
  DensityOperator expect = tensor(e.apply(spin), photon);
  CHECK(max_abs_diff(moved.matrix, expect.matrix) < 1e-12);

  // Entangled spin-photon state: the photon marginal is untouched.
  ComplexVector v = ComplexVector::Zero(8);
  v(0 * 2 + 0) = kInvSqrt2;
  v(1 * 2 + 1) = kInvSqrt2;
  DensityOperator ent =
      DensityOperator::from_pure(PureState(SystemShape({4, 2}), v));
  DensityOperator after = apply_on_factor(e, 0, ent);
  CHECK(max_abs_diff(partial_trace(after, {1}).matrix,
                     partial_trace(ent, {1}).matrix) < 1e-12);

  CHECK_THROWS_AS(apply_on_factor(e, 1, joint), std::invalid_argument);
  CHECK_THROWS_AS(apply_on_factor(e, 5, joint), std::invalid_argument);
}

TEST_CASE("embed_spec rejects mismatched factors") {
  ModelConstants c = test_constants();
  CHECK_THROWS_AS(embed_spec(phonon_spec(c), SystemShape({4, 2})),
                  std::invalid_argument);
}
