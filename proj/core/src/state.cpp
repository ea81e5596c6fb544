#include "g4v/state.hpp"

#include <algorithm>
#include <cmath>

namespace g4v {

namespace {

// Eigenvalues of the Hermitian part, ascending.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

SystemShape::SystemShape(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("SystemShape: no factors");
  for (Eigen::Index d : dims_) {
    if (d < 1) throw std::invalid_argument("SystemShape: factor dimension < 1");
    total_ *= d;
  }
}

SystemShape SystemShape::concat(const SystemShape& other) const {
  std::vector<Eigen::Index> joined = dims_;
  joined.insert(joined.end(), other.dims_.begin(), other.dims_.end());
  return SystemShape(std::move(joined));
}

PureState::PureState(SystemShape shape_, ComplexVector amplitudes_)
    : shape(std::move(shape_)), amplitudes(std::move(amplitudes_)) {
  if (amplitudes.size() != shape.total_dim())
    throw std::invalid_argument("PureState: amplitude count does not match shape");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("PureState: amplitudes not unit norm");
}

PureState PureState::normalized(SystemShape shape_, ComplexVector amplitudes_) {
  double n = amplitudes_.norm();
  if (n == 0.0) throw std::invalid_argument("PureState: zero vector");
  return PureState(std::move(shape_), amplitudes_ / n);
}

DensityOperator::DensityOperator(SystemShape shape_, ComplexMatrix matrix_)
    : shape(std::move(shape_)), matrix(std::move(matrix_)) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("DensityOperator: matrix not square");
  if (matrix.rows() != shape.total_dim())
    throw std::invalid_argument("DensityOperator: matrix dimension does not match shape");
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  return DensityOperator(psi.shape, psi.amplitudes * psi.amplitudes.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(SystemShape shape_) {
  Eigen::Index d = shape_.total_dim();
  return DensityOperator(std::move(shape_),
                         ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

ValidityReport validate(const DensityOperator& rho) {
  ValidityReport r{};
  r.hermiticity_defect = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
  r.trace_defect = std::abs(rho.matrix.trace() - Complex(1.0, 0.0));
  r.min_eigenvalue = hermitian_eigenvalues(rho.matrix).minCoeff();
  return r;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

PureState tensor(const PureState& a, const PureState& b) {
  ComplexVector v(a.amplitudes.size() * b.amplitudes.size());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i)
    v.segment(i * b.amplitudes.size(), b.amplitudes.size()) =
        a.amplitudes(i) * b.amplitudes;
  return PureState(a.shape.concat(b.shape), std::move(v));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(a.shape.concat(b.shape), kron(a.matrix, b.matrix));
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::size_t>& keep) {
  const auto& dims = rho.shape.dims();
  const std::size_t n = dims.size();
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");

  std::vector<bool> kept(n, false);
  for (std::size_t f : keep) {
    if (f >= n) throw std::invalid_argument("partial_trace: factor index out of range");
    if (kept[f]) throw std::invalid_argument("partial_trace: duplicate factor index");
    kept[f] = true;
  }

  std::vector<Eigen::Index> keep_dims, trace_dims;
  std::vector<std::size_t> keep_idx, trace_idx;
  for (std::size_t f = 0; f < n; ++f) {
    if (kept[f]) {
      keep_dims.push_back(dims[f]);
      keep_idx.push_back(f);
    } else {
      trace_dims.push_back(dims[f]);
      trace_idx.push_back(f);
    }
  }

  Eigen::Index dk = 1;
  for (Eigen::Index d : keep_dims) dk *= d;
  Eigen::Index dt = 1;
  for (Eigen::Index d : trace_dims) dt *= d;

  // Strides of each factor in the flat row-major index.
  std::vector<Eigen::Index> stride(n, 1);
  for (std::size_t f = n; f-- > 1;) stride[f - 1] = stride[f] * dims[f];

  auto flat_index = [&](const std::vector<std::size_t>& factors,
                        Eigen::Index packed) {
    Eigen::Index flat = 0;
    for (std::size_t p = factors.size(); p-- > 0;) {
      std::size_t f = factors[p];
      flat += (packed % dims[f]) * stride[f];
      packed /= dims[f];
    }
    return flat;
  };

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex acc(0.0, 0.0);
      Eigen::Index base_i = flat_index(keep_idx, i);
      Eigen::Index base_j = flat_index(keep_idx, j);
      for (Eigen::Index t = 0; t < dt; ++t) {
        Eigen::Index off = flat_index(trace_idx, t);
        acc += rho.matrix(base_i + off, base_j + off);
      }
      out(i, j) = acc;
    }
  }
  return DensityOperator(SystemShape(std::move(keep_dims)), std::move(out));
}

double von_neumann_entropy(const DensityOperator& rho) {
  double herm = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermTol)
    throw std::invalid_argument("von_neumann_entropy: input not Hermitian");
  Eigen::VectorXd evals = hermitian_eigenvalues(rho.matrix);
  double s = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    double lam = evals(i);
    if (lam < -kEigTol)
      throw std::domain_error("von_neumann_entropy: eigenvalue below -1e-9");
    if (lam < 1e-12) continue;  // 0 log 0 == 0
    s -= lam * std::log2(lam);
  }
  return s;
}

namespace {

// Top eigenpair if the state is numerically rank one, i.e. its largest
// eigenvalue accounts for the whole trace.
bool rank_one_vector(const ComplexMatrix& m, ComplexVector* vec) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd& evals = es.eigenvalues();
  double top = evals(evals.size() - 1);
  double rest = evals.sum() - top;
  if (std::abs(rest) > 1e-11 || std::abs(top - 1.0) > 1e-9) return false;
  *vec = es.eigenvectors().col(evals.size() - 1);
  return true;
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd evals = es.eigenvalues();
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    evals(i) = evals(i) > 0.0 ? std::sqrt(evals(i)) : 0.0;
  return es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityOperator& rho1, const DensityOperator& rho2) {
  if (rho1.matrix.rows() != rho2.matrix.rows())
    throw std::invalid_argument("fidelity: dimension mismatch");

  ComplexVector psi;
  if (rank_one_vector(rho2.matrix, &psi))
    return std::max(0.0, (psi.adjoint() * rho1.matrix * psi)(0, 0).real());
  if (rank_one_vector(rho1.matrix, &psi))
    return std::max(0.0, (psi.adjoint() * rho2.matrix * psi)(0, 0).real());

  ComplexMatrix sq = hermitian_sqrt(rho1.matrix);
  ComplexMatrix inner = sq * rho2.matrix * sq;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (inner + inner.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (lam > 0.0) tr += std::sqrt(lam);
  }
  return tr * tr;
}

double fidelity(const DensityOperator& rho, const PureState& psi) {
  if (rho.matrix.rows() != psi.amplitudes.size())
    throw std::invalid_argument("fidelity: dimension mismatch");
  return std::max(0.0,
                  (psi.amplitudes.adjoint() * rho.matrix * psi.amplitudes)(0, 0).real());
}

double trace_distance(const DensityOperator& rho1, const DensityOperator& rho2) {
  if (rho1.matrix.rows() != rho2.matrix.rows())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::VectorXd evals = hermitian_eigenvalues(rho1.matrix - rho2.matrix);
  return 0.5 * evals.cwiseAbs().sum();
}

}  // namespace g4v
