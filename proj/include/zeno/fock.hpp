#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace zeno {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kUnitarityTol = 1e-10;

// Single bosonic mode truncated to number states |0> .. |cutoff-1>.
struct ModeSpace {
  int cutoff;

  explicit ModeSpace(int cutoff_) : cutoff(cutoff_) {
    if (cutoff < 2)
      throw std::invalid_argument("ModeSpace: cutoff must be at least 2, got " +
                                  std::to_string(cutoff));
  }
  int dim() const { return cutoff; }
};

struct LadderOps {
  CMatrix annihilation;
  CMatrix creation;
  CMatrix number;
};

// a|k> = sqrt(k)|k-1>, truncated at the top of the space.
inline LadderOps ladder_ops(const ModeSpace& space) {
  const int d = space.dim();
  LadderOps ops{CMatrix::Zero(d, d), CMatrix::Zero(d, d), CMatrix::Zero(d, d)};
  for (int k = 1; k < d; ++k)
    ops.annihilation(k - 1, k) = std::sqrt(static_cast<double>(k));
  ops.creation = ops.annihilation.adjoint();
  for (int k = 0; k < d; ++k) ops.number(k, k) = static_cast<double>(k);
  return ops;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const CMatrix& h) {
  return max_abs(h - h.adjoint());
}

inline double unitarity_defect(const CMatrix& u) {
  return max_abs(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols()));
}

// exp(+i H t) through the spectral decomposition of Hermitian H.
inline CMatrix hermitian_propagator(const CMatrix& h, double t) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("hermitian_propagator: matrix must be square");
  const double defect = hermiticity_defect(h);
  if (defect > kHermiticityTol)
    throw std::invalid_argument(
        "hermitian_propagator: matrix is not Hermitian (defect " +
        std::to_string(defect) + ")");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_propagator: eigensolver failed");
  CVector phases =
      (Complex(0.0, t) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Cross-Kerr unitary exp(i kappa n_a n_b), diagonal in the joint number
// basis with mode-a-major flattening: flat index = j * dim_b + m.
inline CMatrix kerr_unitary(double kappa, const ModeSpace& a,
                            const ModeSpace& b) {
  const int da = a.dim(), db = b.dim();
  CVector diag(da * db);
  for (int j = 0; j < da; ++j)
    for (int m = 0; m < db; ++m)
      diag(j * db + m) = std::exp(Complex(0.0, kappa * j * m));
  return CMatrix(diag.asDiagonal());
}

inline CVector normalized(const CVector& v) {
  const double n = v.norm();
  if (n < 1e-12)
    throw std::invalid_argument("normalized: vector norm is numerically zero");
  return v / n;
}

// |<u|v>|^2 for two normalized states.
inline double fidelity(const CVector& u, const CVector& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const double nu = u.norm(), nv = v.norm();
  if (nu < 1e-12 || nv < 1e-12)
    throw std::invalid_argument("fidelity: zero-norm state");
  if (std::abs(nu - 1.0) > 1e-6 || std::abs(nv - 1.0) > 1e-6)
    throw std::invalid_argument("fidelity: states must be normalized");
  return std::norm(u.dot(v));
}

// Pure two-mode state with amplitudes amps(j, m) = <j_a, m_b|psi>.
struct JointState {
  CMatrix amps;

  JointState(int dim_a, int dim_b) : amps(CMatrix::Zero(dim_a, dim_b)) {
    if (dim_a < 1 || dim_b < 1)
      throw std::invalid_argument("JointState: dimensions must be positive");
  }

  static JointState product(const CVector& a, const CVector& b) {
    JointState s(static_cast<int>(a.size()), static_cast<int>(b.size()));
    s.amps = a * b.transpose();
    return s;
  }

  int dim_a() const { return static_cast<int>(amps.rows()); }
  int dim_b() const { return static_cast<int>(amps.cols()); }

  double norm() const { return amps.norm(); }

  // Mode-a-major flattening, consistent with kerr_unitary.
  CVector flattened() const {
    CVector flat(amps.size());
    for (int j = 0; j < dim_a(); ++j)
      for (int m = 0; m < dim_b(); ++m) flat(j * dim_b() + m) = amps(j, m);
    return flat;
  }

  static JointState from_flat(const CVector& flat, int dim_a, int dim_b) {
    if (flat.size() != static_cast<Eigen::Index>(dim_a) * dim_b)
      throw std::invalid_argument("JointState: flat size mismatch");
    JointState s(dim_a, dim_b);
    for (int j = 0; j < dim_a; ++j)
      for (int m = 0; m < dim_b; ++m) s.amps(j, m) = flat(j * dim_b + m);
    return s;
  }

  RVector signal_marginal() const {
    return amps.cwiseAbs2().rowwise().sum();
  }

  RVector probe_marginal() const {
    return amps.cwiseAbs2().colwise().sum().transpose();
  }
};

}  // namespace zeno
