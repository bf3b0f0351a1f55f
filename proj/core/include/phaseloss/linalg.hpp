// linalg.hpp - dense Hermitian helpers: eigensystems, SLD equation, trace norm
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace phaseloss::linalg {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kDefaultRankTol = 1e-12;

// Square complex matrix kept Hermitian: the constructor stores (M + M^dag)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m);

  static HermitianMatrix zero(Eigen::Index dim);
  static HermitianMatrix identity(Eigen::Index dim);
  // |v><v|
  static HermitianMatrix projector(const CVector& v);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

 private:
  CMatrix m_;
};

struct EigenSystem {
  RVector eigenvalues;   // descending
  CMatrix eigenvectors;  // columns, unitary
};

EigenSystem hermitian_eig(const HermitianMatrix& h);

// Solves drho = (rho L + L rho)/2 in the eigenbasis of rho. Pairs with
// p_i + p_j <= rank_tol * p_max are set to zero.
HermitianMatrix solve_sld(const HermitianMatrix& rho, const HermitianMatrix& drho,
                          double rank_tol = kDefaultRankTol);
// Same, reusing a precomputed eigensystem of rho.
HermitianMatrix solve_sld(const EigenSystem& rho_eig, const HermitianMatrix& drho,
                          double rank_tol = kDefaultRankTol);

// Sum of singular values.
double trace_norm(const CMatrix& m);

// Column-stacking vectorization, vec(A X B) = (B^T kron A) vec(X).
CVector vec(const CMatrix& m);
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace phaseloss::linalg
