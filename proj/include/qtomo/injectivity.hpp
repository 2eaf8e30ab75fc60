#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qtomo/execution.hpp"
#include "qtomo/linalg.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Frobenius-orthonormal basis of the Hermitian matrices the ensemble
/// measures as zero.
struct NullspaceBasis {
  int n = 0;
  int dimension = 0;
  std::vector<HermitianMatrix> basis;
  /// Realified coordinates of the basis, one column per element (n^2 x dimension).
  RMatrix coordinates;
  RankReport operator_rank;
};

NullspaceBasis nullspace_basis(const UnitaryEnsemble& e, double rank_tol = kDefaultRankTol);

/// Acceptance thresholds for a collision witness.
struct WitnessTolerances {
  double residual = 1e-10;             // ||A(xx*) - A(yy*)||_inf
  double eigenvalue = 1e-8;            // distance of normalized spectrum from (1, 0.., 0, -1)
  double normalized_residual = 1e-8;   // ||A(X)||_inf for the normalized X
  double min_lift_distance = 1e-6;     // ||xx* - yy*||_F
};

/// Two states with equal measurements, plus X = sqrt(2) (xx* - yy*) / ||xx* - yy*||_F.
struct CollisionWitness {
  CVector x;
  CVector y;
  HermitianMatrix normalized = HermitianMatrix::zero(1);
  RVector eigenvalues;  // of normalized, descending
  double measurement_residual = kInfinity;
  double normalized_residual = kInfinity;
  double lift_distance = 0.0;
};

CollisionWitness make_witness(const UnitaryEnsemble& e, const CVector& x, const CVector& y);

/// Empty string when every witness invariant holds, otherwise the first failure.
std::string witness_defect(const CollisionWitness& w, const WitnessTolerances& tol = {});

struct Rank2SearchParams {
  int starts = 64;
  int max_iterations = 2000;
  double gradient_tol = 1e-12;
  double success_threshold = 1e-12;
  double eigenvalue_tol = 1e-8;
  Execution execution = Execution::parallel;
};

struct Rank2SearchResult {
  /// Rescaled to ||X||_F = sqrt(2); eigenvalues (1, -1) within eigenvalue_tol.
  std::optional<HermitianMatrix> matrix;
  /// Smallest objective over the starts that ran (the winner's when found).
  double objective_floor = kInfinity;
  int winning_start = -1;
};

/// Sum of squared eigenvalues strictly between the largest and the smallest,
/// evaluated on x / ||x||_F.
double middle_eigenvalue_objective(const HermitianMatrix& x);

/// Multistart projected-gradient minimization of middle_eigenvalue_objective
/// over unit vectors of span(basis).
Rank2SearchResult find_rank2_indefinite(const NullspaceBasis& basis, const Rank2SearchParams& params,
                                        const SeededRng& rng);

struct DirectSearchParams {
  int starts = 64;
  int max_iterations = 2000;
  int polish_iterations = 2000;
  double barrier = 1e-8;
  /// Starts whose barrier-phase residual is below this are polished without the barrier.
  double polish_gate = 1e-6;
  double gradient_tol = 1e-14;
  WitnessTolerances tolerances;
  Execution execution = Execution::parallel;
};

struct DirectSearchResult {
  std::optional<CollisionWitness> witness;
  /// Smallest ||A(xx*) - A(yy*)||_inf reached with the barrier active.
  double best_residual = kInfinity;
  int winning_start = -1;
};

/// Minimizes ||A(xx*) - A(yy*)||^2 + barrier / ||xx* - yy*||_F^2 over unit x, y.
DirectSearchResult collision_search_direct(const UnitaryEnsemble& e, const DirectSearchParams& params,
                                           const SeededRng& rng);

/// Value and gradient of the direct-search objective; gradients are returned
/// as complex vectors g with dF = Re(g^* dx). Exposed for gradient tests.
struct DirectObjective {
  double value = 0.0;
  double residual_inf = 0.0;
  CVector grad_x;
  CVector grad_y;
};
DirectObjective direct_objective(const UnitaryEnsemble& e, const CVector& x, const CVector& y,
                                 double barrier);

enum class OracleVerdict { injective, not_injective };
std::string_view to_string(OracleVerdict v);

/// Bloch vector of the rank-one measurement z z^* (n = 2).
Eigen::Vector3d bloch_vector(const CVector& z);

/// Exact injectivity test for n = 2: injective iff the Bloch vectors of all
/// rows span R^3.
OracleVerdict bloch_oracle_n2(const UnitaryEnsemble& e);

struct OrbitReduction {
  CMatrix u;
  UnitaryEnsemble reduced;
  /// ||apply(reduced, e1 e1^* - e2 e2^*)||_inf
  double residual;
};

/// Right-multiplies the ensemble by U with U e1 = conj(u), U e2 = conj(v),
/// moving the collision onto (e1, e2).
OrbitReduction orbit_reduce(const UnitaryEnsemble& e, const CVector& u, const CVector& v);
/// Uses the +1 and -1 eigenvectors of the witness matrix.
OrbitReduction orbit_reduce(const UnitaryEnsemble& e, const CollisionWitness& w);

enum class Verdict { collision_found, no_collision_found };
std::string_view to_string(Verdict v);

struct CertifyConfig {
  Rank2SearchParams rank2;
  DirectSearchParams direct;
  WitnessTolerances witness;
  double rank_tol = kDefaultRankTol;
  /// With a trivial nullspace the map is injective on all Hermitian matrices.
  bool skip_search_when_nullspace_empty = true;
};

/// no_collision_found is evidence (both searches failed), not a proof.
struct CertificationReport {
  Verdict verdict = Verdict::no_collision_found;
  std::optional<CollisionWitness> witness;
  std::string witness_source;  // "rank2" or "direct"
  int n = 0;
  int m = 0;
  int nullspace_dimension = 0;
  bool searches_skipped = false;
  double search_floor = kInfinity;
  double direct_search_floor = kInfinity;
  std::optional<OracleVerdict> oracle_verdict;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  CertifyConfig config;
  double wall_time_ms = 0.0;
};

/// Nullspace -> rank-2 search, plus direct search; attaches the Bloch oracle
/// when n = 2 and throws InternalError if it disagrees with the verdict.
CertificationReport certify(const UnitaryEnsemble& e, const CertifyConfig& config, const SeededRng& rng);

}  // namespace qtomo
