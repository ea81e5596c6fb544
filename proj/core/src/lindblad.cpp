#include "g4v/lindblad.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace g4v {

namespace {

ComplexMatrix level_projector(int k) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(k, k) = 1.0;
  return m;
}

ComplexMatrix level_transfer(int to, int from) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(to, from) = 1.0;
  return m;
}

}  // namespace

LindbladSpec phonon_spec(const ModelConstants& c) {
  LindbladSpec spec;
  // Levels |1>..|4> are code indices 0..3; {1,2} low, {3,4} high.
  spec.hamiltonian = 0.5 * c.omega_a_prime_rad_s *
      (level_projector(3) - level_projector(1) + level_projector(2) -
       level_projector(0));
  double down = c.gamma_s_inv * (c.nbar + 1.0);
  double up = c.gamma_s_inv * c.nbar;
  spec.jump_ops = {
      {level_transfer(1, 3), down},  // |2><4|
      {level_transfer(3, 1), up},    // |4><2|
      {level_transfer(0, 2), down},  // |1><3|
      {level_transfer(2, 0), up},    // |3><1|
  };
  return spec;
}

LindbladSpec embed_spec(const LindbladSpec& spec, const SystemShape& shape) {
  Eigen::Index d = spec.hamiltonian.rows();
  for (std::size_t f = 0; f < shape.factor_count(); ++f)
    if (shape.dim(f) != d)
      throw std::invalid_argument("embed_spec: factor dimension mismatch");

  Eigen::Index total = shape.total_dim();
  auto embed = [&](const ComplexMatrix& op, std::size_t factor) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (std::size_t f = 0; f < shape.factor_count(); ++f)
      out = kron(out, f == factor ? op
                                  : ComplexMatrix::Identity(shape.dim(f), shape.dim(f)));
    return out;
  };

  LindbladSpec big;
  big.hamiltonian = ComplexMatrix::Zero(total, total);
  for (std::size_t f = 0; f < shape.factor_count(); ++f) {
    big.hamiltonian += embed(spec.hamiltonian, f);
    for (const auto& [op, rate] : spec.jump_ops)
      big.jump_ops.emplace_back(embed(op, f), rate);
  }
  return big;
}

Liouvillian build_generator(const LindbladSpec& spec) {
  Eigen::Index d = spec.hamiltonian.rows();
  ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const Complex i_unit(0.0, 1.0);

  ComplexMatrix lv = -i_unit * (kron(spec.hamiltonian, id) -
                                kron(id, spec.hamiltonian.transpose()));
  for (const auto& [op, rate] : spec.jump_ops) {
    if (rate < 0.0) throw std::invalid_argument("build_generator: negative rate");
    ComplexMatrix opdag_op = op.adjoint() * op;
    lv += rate * (kron(op, op.conjugate()) -
                  0.5 * kron(opdag_op, id) -
                  0.5 * kron(id, opdag_op.transpose()));
  }
  return Liouvillian{d, std::move(lv)};
}

Liouvillian build_generator(const ModelConstants& c) {
  return build_generator(phonon_spec(c));
}

ComplexVector vectorize(const ComplexMatrix& rho) {
  Eigen::Index d = rho.rows();
  if (rho.cols() != d) throw std::invalid_argument("vectorize: matrix not square");
  ComplexVector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  return v;
}

ComplexMatrix devectorize(const ComplexVector& v) {
  auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (d * d != v.size())
    throw std::invalid_argument("devectorize: length not a perfect square");
  ComplexMatrix rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho;
}

DensityOperator Propagator::apply(const DensityOperator& rho) const {
  if (matrix.rows() != rho.matrix.size())
    throw std::invalid_argument("Propagator::apply: dimension mismatch");
  return DensityOperator(rho.shape, devectorize(matrix * vectorize(rho.matrix)));
}

namespace {

// Connected components of the symmetrized sparsity pattern. The phonon
// generator splits into twelve isolated coherences plus two 2x2 population
// blocks; diagonalizing blocks independently keeps eigenvalues exact even
// when rate and oscillation scales differ by many orders of magnitude.
std::vector<std::vector<Eigen::Index>> sparsity_components(const ComplexMatrix& m) {
  Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  std::function<Eigen::Index(Eigen::Index)> find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && (m(i, j) != Complex(0, 0) || m(j, i) != Complex(0, 0)))
        parent[find(i)] = find(j);

  std::vector<std::vector<Eigen::Index>> comps;
  std::vector<Eigen::Index> comp_of(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index r = find(i);
    if (comp_of[r] < 0) {
      comp_of[r] = static_cast<Eigen::Index>(comps.size());
      comps.emplace_back();
    }
    comps[comp_of[r]].push_back(i);
  }
  return comps;
}

}  // namespace

Propagator spectral_propagator(const Liouvillian& lv, double t_s) {
  Eigen::Index n = lv.matrix.rows();
  Propagator out;
  out.elapsed_s = t_s;
  out.matrix = ComplexMatrix::Zero(n, n);

  bool fallback = false;
  for (const auto& comp : sparsity_components(lv.matrix)) {
    Eigen::Index k = static_cast<Eigen::Index>(comp.size());
    if (k == 1) {
      out.matrix(comp[0], comp[0]) = std::exp(lv.matrix(comp[0], comp[0]) * t_s);
      continue;
    }
    ComplexMatrix block(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) block(a, b) = lv.matrix(comp[a], comp[b]);

    Eigen::ComplexEigenSolver<ComplexMatrix> es(block);
    bool block_ok = es.info() == Eigen::Success;
    if (block_ok) {
      Eigen::JacobiSVD<ComplexMatrix> svd(es.eigenvectors());
      double smin = svd.singularValues()(svd.singularValues().size() - 1);
      double smax = svd.singularValues()(0);
      block_ok = smin > 0.0 && smax / smin < 1e12;
    }
    if (!block_ok) {
      fallback = true;
      break;
    }

    ComplexVector phases(k);
    for (Eigen::Index a = 0; a < k; ++a)
      phases(a) = std::exp(es.eigenvalues()(a) * t_s);
    ComplexMatrix eblock = es.eigenvectors() * phases.asDiagonal() *
                           es.eigenvectors().inverse();
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) out.matrix(comp[a], comp[b]) = eblock(a, b);
  }

  if (fallback) {
    std::cerr << "spectral_propagator: ill-conditioned eigenvectors, "
                 "using scaling-and-squaring exponential\n";
    out.matrix = (lv.matrix * t_s).exp();
    out.expm_fallback = true;
  }
  return out;
}

ComplexMatrix lindblad_rhs(const LindbladSpec& spec, const ComplexMatrix& rho) {
  const Complex i_unit(0.0, 1.0);
  ComplexMatrix drho = -i_unit * (spec.hamiltonian * rho - rho * spec.hamiltonian);
  for (const auto& [op, rate] : spec.jump_ops) {
    ComplexMatrix opdag_op = op.adjoint() * op;
    drho += rate * (op * rho * op.adjoint() -
                    0.5 * (opdag_op * rho + rho * opdag_op));
  }
  return drho;
}

DensityOperator rk4_evolve(const DensityOperator& rho, const LindbladSpec& spec,
                           double t_s, double dt_s) {
  if (t_s < 0.0 || dt_s <= 0.0)
    throw std::invalid_argument("rk4_evolve: need t >= 0 and dt > 0");

  double rate_sum = 0.0;
  for (const auto& [op, rate] : spec.jump_ops) rate_sum += rate;
  double h_scale = spec.hamiltonian.cwiseAbs().maxCoeff();
  double bound = 0.01 / std::max(rate_sum + 2.0 * h_scale, 1e-300);
  if (dt_s > bound)
    std::cerr << "rk4_evolve: dt = " << dt_s
              << " exceeds recommended stability bound " << bound << "\n";

  ComplexMatrix y = rho.matrix;
  double t = 0.0;
  while (t < t_s) {
    double h = std::min(dt_s, t_s - t);
    ComplexMatrix k1 = lindblad_rhs(spec, y);
    ComplexMatrix k2 = lindblad_rhs(spec, y + 0.5 * h * k1);
    ComplexMatrix k3 = lindblad_rhs(spec, y + 0.5 * h * k2);
    ComplexMatrix k4 = lindblad_rhs(spec, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return DensityOperator(rho.shape, std::move(y));
}

DensityOperator rk4_evolve(const DensityOperator& rho, const ModelConstants& c,
                           double t_s, double dt_s) {
  return rk4_evolve(rho, phonon_spec(c), t_s, dt_s);
}

double KrausSet::completeness_defect() const {
  Eigen::Index d = ops[0].rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& m : ops) sum += m.adjoint() * m;
  return (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

KrausSet kraus_set(const ModelConstants& c, double dt_s) {
  if (dt_s < 0.0) throw std::invalid_argument("kraus_set: dt must be >= 0");
  double x = c.gamma_s_inv * (2.0 * c.nbar + 1.0) * dt_s;
  if (x >= 0.1)
    throw std::invalid_argument(
        "kraus_set: gamma(2 nbar + 1) dt >= 0.1 violates the short-step regime");
  if (x > 0.01)
    std::cerr << "kraus_set: gamma(2 nbar + 1) dt = " << x
              << " > 0.01; first-order channel error grows quadratically\n";

  LindbladSpec spec = phonon_spec(c);
  ComplexMatrix drift = ComplexMatrix::Zero(4, 4);  // K = -1/2 sum g L^dag L
  for (const auto& [op, rate] : spec.jump_ops)
    drift -= 0.5 * rate * (op.adjoint() * op);
  const Complex i_unit(0.0, 1.0);

  KrausSet ks;
  ks.dt_s = dt_s;
  ks.ops[0] = ComplexMatrix::Identity(4, 4) +
              (drift - i_unit * spec.hamiltonian) * dt_s;
  for (std::size_t k = 0; k < spec.jump_ops.size(); ++k) {
    const auto& [op, rate] = spec.jump_ops[k];
    ks.ops[k + 1] = std::sqrt(rate * dt_s) * op;
  }
  return ks;
}

DensityOperator kraus_apply(const DensityOperator& rho, const KrausSet& ks) {
  if (rho.matrix.rows() != ks.ops[0].rows())
    throw std::invalid_argument("kraus_apply: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(rho.matrix.rows(), rho.matrix.cols());
  for (const auto& m : ks.ops) out += m * rho.matrix * m.adjoint();
  return DensityOperator(rho.shape, std::move(out));
}

DensityOperator kraus_evolve(const DensityOperator& rho, const KrausSet& ks,
                             long n_steps) {
  if (n_steps < 0) throw std::invalid_argument("kraus_evolve: negative step count");
  DensityOperator out = rho;
  for (long s = 0; s < n_steps; ++s) out = kraus_apply(out, ks);
  return out;
}

Propagator multi_spin_propagator(const Propagator& e, int n, Eigen::Index dim_cap) {
  if (n < 1) throw std::invalid_argument("multi_spin_propagator: n must be >= 1");
  auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(double(e.matrix.rows()))));
  if (d * d != e.matrix.rows())
    throw std::invalid_argument("multi_spin_propagator: malformed propagator");
  if (n == 1) return e;

  Eigen::Index total = 1;
  for (int k = 0; k < n; ++k) {
    total *= d;
    if (total > dim_cap)
      throw std::invalid_argument(
          "multi_spin_propagator: composite dimension exceeds cap");
  }

  // Composite entry: product over factors of E[(i_f, j_f), (k_f, l_f)],
  // with row index (I*total + J) for row-major vec over shape [d]^n.
  Propagator out;
  out.elapsed_s = e.elapsed_s;
  out.expm_fallback = e.expm_fallback;
  out.matrix = ComplexMatrix(total * total, total * total);
  std::vector<Eigen::Index> if_(n), jf(n), kf(n), lf(n);
  auto digits = [&](Eigen::Index flat, std::vector<Eigen::Index>& out_digits) {
    for (int f = n; f-- > 0;) {
      out_digits[f] = flat % d;
      flat /= d;
    }
  };
  for (Eigen::Index bi = 0; bi < total; ++bi) {
    digits(bi, if_);
    for (Eigen::Index bj = 0; bj < total; ++bj) {
      digits(bj, jf);
      for (Eigen::Index bk = 0; bk < total; ++bk) {
        digits(bk, kf);
        for (Eigen::Index bl = 0; bl < total; ++bl) {
          digits(bl, lf);
          Complex prod(1.0, 0.0);
          for (int f = 0; f < n; ++f)
            prod *= e.matrix(if_[f] * d + jf[f], kf[f] * d + lf[f]);
          out.matrix(bi * total + bj, bk * total + bl) = prod;
        }
      }
    }
  }
  return out;
}

DensityOperator apply_on_factor(const Propagator& e, std::size_t factor,
                                const DensityOperator& rho) {
  const auto& dims = rho.shape.dims();
  if (factor >= dims.size())
    throw std::invalid_argument("apply_on_factor: factor index out of range");
  Eigen::Index d = dims[factor];
  if (e.matrix.rows() != d * d)
    throw std::invalid_argument("apply_on_factor: propagator dimension mismatch");

  Eigen::Index pre = 1, post = 1;
  for (std::size_t f = 0; f < factor; ++f) pre *= dims[f];
  for (std::size_t f = factor + 1; f < dims.size(); ++f) post *= dims[f];

  ComplexMatrix out = ComplexMatrix::Zero(rho.matrix.rows(), rho.matrix.cols());
  auto flat = [&](Eigen::Index a, Eigen::Index i, Eigen::Index b) {
    return (a * d + i) * post + b;
  };
  for (Eigen::Index a = 0; a < pre; ++a)
    for (Eigen::Index ap = 0; ap < pre; ++ap)
      for (Eigen::Index b = 0; b < post; ++b)
        for (Eigen::Index bp = 0; bp < post; ++bp)
          for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
              Complex acc(0.0, 0.0);
              for (Eigen::Index k = 0; k < d; ++k)
                for (Eigen::Index l = 0; l < d; ++l)
                  acc += e.matrix(i * d + j, k * d + l) *
                         rho.matrix(flat(a, k, b), flat(ap, l, bp));
              out(flat(a, i, b), flat(ap, j, bp)) = acc;
            }
  return DensityOperator(rho.shape, std::move(out));
}

}  // namespace g4v
