#include "qtomo/linalg.hpp"

#include <algorithm>
#include <string>

#include "qtomo/errors.hpp"

namespace qtomo {
namespace {

double hermitian_defect(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw PreconditionError("Hermitian matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw PreconditionError("Hermitian matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = hermitian_defect(m);
  if (defect > tol * scale) {
    throw PreconditionError("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

template <typename Svd>
RankReport rank_from_svd(const Svd& svd, double rel_tol) {
  RankReport report;
  report.singular_values = svd.singularValues();
  if (report.singular_values.size() == 0) return report;
  const double top = report.singular_values(0);
  if (top == 0.0) return report;
  for (Eigen::Index k = 0; k < report.singular_values.size(); ++k) {
    if (report.singular_values(k) > rel_tol * top) ++report.rank;
  }
  return report;
}

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& m, double tol) {
  require_hermitian(m, tol);
  m_ = 0.5 * (m + m.adjoint());
  for (Eigen::Index k = 0; k < m_.rows(); ++k) m_(k, k) = Complex(m_(k, k).real(), 0.0);
}

HermitianMatrix HermitianMatrix::zero(int n) {
  if (n <= 0) throw PreconditionError("dimension must be positive");
  return HermitianMatrix(CMatrix::Zero(n, n), Unchecked{});
}

HermitianMatrix HermitianMatrix::outer(const CVector& x) {
  if (x.size() == 0) throw PreconditionError("empty vector");
  CMatrix m = x * x.adjoint();
  for (Eigen::Index k = 0; k < m.rows(); ++k) m(k, k) = Complex(std::norm(x(k)), 0.0);
  return HermitianMatrix(std::move(m), Unchecked{});
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  if (other.size() != size()) throw DimensionMismatch("Hermitian sum of different sizes");
  return HermitianMatrix(m_ + other.m_, Unchecked{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  if (other.size() != size()) throw DimensionMismatch("Hermitian difference of different sizes");
  return HermitianMatrix(m_ - other.m_, Unchecked{});
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(m_ * s, Unchecked{});
}

EigenDecomposition hermitian_eig(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

EigenDecomposition hermitian_eig(const CMatrix& h) {
  return hermitian_eig(HermitianMatrix(h));
}

RankReport rank_with_tol(const RMatrix& m, double rel_tol) {
  if (!m.allFinite()) throw PreconditionError("rank_with_tol: non-finite entries");
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<RMatrix> svd(m);
  return rank_from_svd(svd, rel_tol);
}

RankReport rank_with_tol(const CMatrix& m, double rel_tol) {
  if (!m.allFinite()) throw PreconditionError("rank_with_tol: non-finite entries");
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<CMatrix> svd(m);
  return rank_from_svd(svd, rel_tol);
}

CMatrix haar_unitary(int n, SeededRng& rng) {
  if (n < 1) throw PreconditionError("haar_unitary: n must be >= 1");
  CMatrix g(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) g(r, c) = rng.complex_normal();
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= (mag > 0.0 ? d / mag : Complex(1.0, 0.0));
  }
  return q;
}

double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).norm();
}

CVector random_unit_vector(int n, SeededRng& rng) {
  if (n < 1) throw PreconditionError("random_unit_vector: n must be >= 1");
  CVector x(n);
  for (int k = 0; k < n; ++k) x(k) = rng.complex_normal();
  return x / x.norm();
}

CMatrix complete_to_unitary(const CMatrix& cols) {
  const Eigen::Index n = cols.rows();
  const Eigen::Index k = cols.cols();
  if (k > n) throw PreconditionError("complete_to_unitary: more columns than rows");
  CMatrix a(n, k + n);
  a << cols, CMatrix::Identity(n, n);
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

}  // namespace qtomo
