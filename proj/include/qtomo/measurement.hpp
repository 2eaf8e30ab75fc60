#pragma once

#include <string_view>
#include <vector>

#include "qtomo/linalg.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

enum class Provenance { haar, diagonal, shared_eigenbasis, fourier_masked, explicit_ };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// Tolerance on ||U^*U - I||_F accepted for ensemble members.
inline constexpr double kEnsembleUnitarityTol = 1e-10;

/// Ordered list of m unitary n x n matrices. Row i of unitary k is the
/// measurement vector z at global index k*n + i.
class UnitaryEnsemble {
 public:
  UnitaryEnsemble(std::vector<CMatrix> unitaries, Provenance provenance);

  static UnitaryEnsemble haar(int n, int m, SeededRng& rng);

  int n() const { return n_; }
  int m() const { return static_cast<int>(unitaries_.size()); }
  int measurement_count() const { return n_ * m(); }
  Provenance provenance() const { return provenance_; }
  const CMatrix& unitary(int k) const { return unitaries_.at(k); }
  const std::vector<CMatrix>& unitaries() const { return unitaries_; }

  /// z at global index (as a column vector; entries are the row of the unitary).
  CVector row(int index) const;

  /// Every member multiplied on the right by u.
  UnitaryEnsemble right_multiplied(const CMatrix& u) const;

 private:
  int n_;
  std::vector<CMatrix> unitaries_;
  Provenance provenance_;
};

/// Values Tr(z_i z_i^* X), grouped into m blocks of n.
struct MeasurementVector {
  int n = 0;
  int m = 0;
  RVector values;

  auto block(int k) const { return values.segment(static_cast<Eigen::Index>(k) * n, n); }
  double block_sum(int k) const { return block(k).sum(); }
};

/// Tr(z_i z_i^* X) = z_i^* X z_i for every row.
MeasurementVector apply_ensemble(const UnitaryEnsemble& e, const HermitianMatrix& x);
/// apply_ensemble(e, x x^*) evaluated as |<z_i, x>|^2 without forming x x^*.
MeasurementVector measure_state(const UnitaryEnsemble& e, const CVector& x);

/// Replaces values in (-1e-12, 0) by 0; larger negative values are kept.
MeasurementVector clamp_dust(MeasurementVector mv, double dust = 1e-12);

/// Isometric coordinates of a Hermitian matrix: n diagonal entries, then
/// sqrt(2) Re X_kl and then sqrt(2) Im X_kl over the upper triangle k < l
/// in row-major order.
RVector realify(const HermitianMatrix& x);
HermitianMatrix unrealify(const RVector& coords, int n);

/// The measurement map as an (m n) x n^2 real matrix acting on realify(X).
struct RealifiedOperator {
  RMatrix matrix;
  RankReport rank;
};

RealifiedOperator realified_operator(const UnitaryEnsemble& e, double rank_tol = kDefaultRankTol);

/// Normalized intensities of x with the last row of each unitary dropped:
/// m(n-1) values, block-major. Invariant under x -> c x for complex c != 0.
RVector embedding_map(const UnitaryEnsemble& e, const CVector& x);

/// Rank of a central finite-difference Jacobian of embedding_map at x,
/// taken with respect to the 2n real coordinates of x. Expected 2(n-1) for
/// an embedding.
RankReport embedding_differential_rank(const UnitaryEnsemble& e, const CVector& x,
                                       double step = 1e-6, double rel_tol = 1e-6);

/// Appends norm_sq - sum(partial): the intensity of the dropped row.
RVector complete_dropped_block(const RVector& partial, double norm_sq, double tol = 1e-10);

/// 4n - 2 alpha(n-1) - 4, alpha = number of ones in binary.
int min_measurement_lower_bound(int n);

enum class StructuredKind { diagonal, shared_eigenbasis, fourier_masked };

StructuredKind structured_kind_from_string(std::string_view s);

/// Non-generic ensembles. diagonal: random phase diagonals. shared_eigenbasis:
/// D_k V for one Haar V. fourier_masked: F D_k with F the unitary DFT.
UnitaryEnsemble structured_ensemble(StructuredKind kind, int n, SeededRng& rng, int m = 4);

/// Unitary DFT matrix, F_jk = exp(-2 pi i j k / n) / sqrt(n).
CMatrix fourier_matrix(int n);

}  // namespace qtomo
