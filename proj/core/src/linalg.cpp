// linalg.cpp
#include "phaseloss/linalg.hpp"

#include "phaseloss/error.hpp"

namespace phaseloss::linalg {

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("HermitianMatrix: matrix is not square");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  return HermitianMatrix(CMatrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(CMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::projector(const CVector& v) {
  return HermitianMatrix(v * v.adjoint());
}

EigenSystem hermitian_eig(const HermitianMatrix& h) {
  if (!h.matrix().allFinite()) throw InvalidInput("hermitian_eig: non-finite entries");
  const Eigen::Index n = h.dim();
  EigenSystem out;
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw InvalidInput("hermitian_eig: eigensolver failed");
  // Eigen sorts ascending; flip to descending.
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  return out;
}

HermitianMatrix solve_sld(const EigenSystem& eig, const HermitianMatrix& drho, double rank_tol) {
  const Eigen::Index n = eig.eigenvalues.size();
  if (drho.dim() != n) throw InvalidInput("solve_sld: dimension mismatch");
  if (n == 0) return HermitianMatrix::zero(0);
  const RVector& p = eig.eigenvalues;
  const CMatrix& U = eig.eigenvectors;
  const double cut = rank_tol * std::max(p(0), 0.0);

  CMatrix d = U.adjoint() * drho.matrix() * U;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = p(i) + p(j);
      d(i, j) = s > cut ? 2.0 * d(i, j) / s : cplx(0.0);
    }
  }
  return HermitianMatrix(U * d * U.adjoint());
}

HermitianMatrix solve_sld(const HermitianMatrix& rho, const HermitianMatrix& drho, double rank_tol) {
  if (rho.dim() != drho.dim()) throw InvalidInput("solve_sld: dimension mismatch");
  return solve_sld(hermitian_eig(rho), drho, rank_tol);
}

double trace_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace phaseloss::linalg
