#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qtomo/rng.hpp"

namespace qtomo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kDefaultRankTol = 1e-10;

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction checks the Hermitian property entrywise (absolute tolerance
/// scaled by max(1, largest entry)) and then symmetrizes exactly, so the
/// stored matrix is Hermitian to the last bit.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMatrix& m, double tol = kHermitianTol);

  static HermitianMatrix zero(int n);
  /// x x^*.
  static HermitianMatrix outer(const CVector& x);

  const CMatrix& matrix() const { return m_; }
  int size() const { return static_cast<int>(m_.rows()); }
  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator*(double s) const;

 private:
  struct Unchecked {};
  HermitianMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Eigenvalues sorted descending with matching eigenvector columns.
struct EigenDecomposition {
  RVector values;
  CMatrix vectors;
};

EigenDecomposition hermitian_eig(const HermitianMatrix& h);
/// Checks the Hermitian precondition before decomposing.
EigenDecomposition hermitian_eig(const CMatrix& h);

struct RankReport {
  int rank = 0;
  RVector singular_values;  // descending
};

RankReport rank_with_tol(const RMatrix& m, double rel_tol = kDefaultRankTol);
RankReport rank_with_tol(const CMatrix& m, double rel_tol = kDefaultRankTol);

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// phases of diag(R) moved into Q.
CMatrix haar_unitary(int n, SeededRng& rng);

/// ||U^* U - I||_F.
double unitarity_defect(const CMatrix& u);

/// Uniformly random unit vector in C^n.
CVector random_unit_vector(int n, SeededRng& rng);

/// Completes orthonormal columns to a unitary matrix (Householder QR on
/// [cols | I], phases fixed so the given columns are reproduced).
CMatrix complete_to_unitary(const CMatrix& orthonormal_columns);

}  // namespace qtomo
