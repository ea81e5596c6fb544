#include "g4v/metrics.hpp"

#include <cmath>
#include <limits>

#include "g4v/lindblad.hpp"

namespace g4v {

Complex coherence_element(const DensityOperator& rho, Eigen::Index bra,
                          Eigen::Index ket) {
  if (bra < 0 || ket < 0 || bra >= rho.matrix.rows() || ket >= rho.matrix.rows())
    throw std::invalid_argument("coherence_element: level index out of range");
  return rho.matrix(bra, ket);
}

double hashing_bound(const DensityOperator& rho_ab, Eigen::Index dim_a,
                     Eigen::Index dim_b) {
  if (dim_a * dim_b != rho_ab.matrix.rows())
    throw std::invalid_argument("hashing_bound: dimensions do not factor the state");
  DensityOperator joint(SystemShape({dim_a, dim_b}), rho_ab.matrix);
  double s_ab = von_neumann_entropy(joint);
  double s_a = von_neumann_entropy(partial_trace(joint, {0}));
  double s_b = von_neumann_entropy(partial_trace(joint, {1}));
  return std::min(s_a, s_b) - s_ab;
}

DecayCurve::DecayCurve(std::vector<double> times, std::vector<double> vals)
    : times_s(std::move(times)), values(std::move(vals)) {
  if (times_s.size() != values.size())
    throw std::invalid_argument("DecayCurve: length mismatch");
  for (std::size_t i = 0; i < times_s.size(); ++i) {
    if (!std::isfinite(times_s[i]) || !std::isfinite(values[i]))
      throw std::invalid_argument("DecayCurve: non-finite sample");
    if (i > 0 && times_s[i] <= times_s[i - 1])
      throw std::invalid_argument("DecayCurve: times not strictly increasing");
  }
}

FitResult fit_exponential(const DecayCurve& curve,
                          std::optional<double> amplitude_fixed,
                          double floor_fraction) {
  const auto& t = curve.times_s;
  const auto& v = curve.values;
  if (t.size() < 3)
    throw std::invalid_argument("fit_exponential: need at least 3 samples");
  if (v.front() <= 0.0)
    throw std::invalid_argument(
        "fit_exponential: non-positive leading sample; truncate the curve "
        "above the floor before fitting");

  double floor = floor_fraction * v.front();
  std::vector<double> ts, ys;  // y = ln v
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (v[i] < floor) continue;
    ts.push_back(t[i]);
    ys.push_back(std::log(v[i]));
  }
  if (ts.size() < 3)
    throw std::invalid_argument(
        "fit_exponential: fewer than 3 samples above the floor; truncate "
        "the curve or lower the floor");

  double slope, intercept;
  if (amplitude_fixed) {
    if (*amplitude_fixed <= 0.0)
      throw std::invalid_argument("fit_exponential: amplitude must be > 0");
    // Minimize sum (y_i - ln A + t_i / tau)^2 over the rate alone.
    intercept = std::log(*amplitude_fixed);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      num += ts[i] * (ys[i] - intercept);
      den += ts[i] * ts[i];
    }
    slope = den > 0.0 ? num / den : 0.0;
  } else {
    double n = static_cast<double>(ts.size());
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      st += ts[i];
      sy += ys[i];
      stt += ts[i] * ts[i];
      sty += ts[i] * ys[i];
    }
    double det = n * stt - st * st;
    if (det == 0.0) throw std::invalid_argument("fit_exponential: degenerate times");
    slope = (n * sty - st * sy) / det;
    intercept = (sy - slope * st) / n;
  }

  FitResult out{};
  out.amplitude = amplitude_fixed ? *amplitude_fixed : std::exp(intercept);
  out.tau_s = slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();

  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double model = out.amplitude *
        (std::isinf(out.tau_s) ? 1.0 : std::exp(-ts[i] / out.tau_s));
    double r = std::exp(ys[i]) - model;
    ss += r * r;
  }
  out.residual_rms = std::sqrt(ss / static_cast<double>(ts.size()));
  return out;
}

std::vector<ScanPoint> decoherence_scan(const std::vector<ModelConstants>& grid,
                                        const DensityOperator& initial,
                                        double horizon_s, int n_samples) {
  if (n_samples < 3)
    throw std::invalid_argument("decoherence_scan: need at least 3 samples");
  if (horizon_s <= 0.0)
    throw std::invalid_argument("decoherence_scan: horizon must be > 0");

  std::size_t n_factors = initial.shape.factor_count();
  if (n_factors > 2 || initial.shape.dim(0) != 4 ||
      (n_factors == 2 && initial.shape.dim(1) != 4))
    throw std::invalid_argument("decoherence_scan: expected shape [4] or [4,4]");

  std::vector<ScanPoint> out;
  out.reserve(grid.size());
  for (const auto& c : grid) {
    Liouvillian lv = build_generator(c);
    std::vector<double> ts(n_samples), vs(n_samples);
    for (int s = 0; s < n_samples; ++s) {
      double t = horizon_s * static_cast<double>(s) /
                 static_cast<double>(n_samples - 1);
      Propagator e = spectral_propagator(lv, t);
      DensityOperator rho =
          n_factors == 1 ? e.apply(initial)
                         : multi_spin_propagator(e, 2).apply(initial);
      ts[s] = t;
      vs[s] = n_factors == 1 ? std::abs(coherence_element(rho, 0, 1))
                             : hashing_bound(rho, 4, 4);
    }
    double amplitude = n_factors == 1 ? 0.5 : 1.0;
    out.push_back({c.temperature_k, fit_exponential(DecayCurve(ts, vs), amplitude)});
  }
  return out;
}

}  // namespace g4v
