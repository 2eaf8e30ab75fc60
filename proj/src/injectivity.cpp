#include "qtomo/injectivity.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <climits>
#include <cmath>
#include <numbers>

#include "qtomo/errors.hpp"

namespace qtomo {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kMinStep = 1e-14;
constexpr double kMaxStep = 1e6;

// Lowest start index that succeeded so far. Starts above it are skipped,
// which keeps the reported winner independent of scheduling.
class FirstSuccess {
 public:
  bool beaten_by_lower(int start) const { return best_.load(std::memory_order_relaxed) < start; }
  void record(int start) {
    int cur = best_.load(std::memory_order_relaxed);
    while (start < cur && !best_.compare_exchange_weak(cur, start, std::memory_order_relaxed)) {
    }
  }
  int get() const { return best_.load(); }

 private:
  std::atomic<int> best_{INT_MAX};
};

// ---- rank-2 search ---------------------------------------------------------

struct Rank2Eval {
  double value = 0.0;
  RVector grad;  // Euclidean gradient in basis coefficients
};

Rank2Eval rank2_eval(const NullspaceBasis& nb, const RVector& c) {
  const HermitianMatrix x = unrealify(nb.coordinates * c, nb.n);
  const auto eig = hermitian_eig(x);
  const int n = nb.n;
  Rank2Eval out;
  CMatrix p = CMatrix::Zero(n, n);
  for (int k = 1; k + 1 < n; ++k) {
    const double lam = eig.values(k);
    out.value += lam * lam;
    p += lam * eig.vectors.col(k) * eig.vectors.col(k).adjoint();
  }
  // d lambda_k / d c_j = <u_k, B_j u_k> = <B_j, u_k u_k^*>_F.
  out.grad = 2.0 * nb.coordinates.transpose() * realify(HermitianMatrix(p, 1e-9));
  return out;
}

RVector random_unit_real(Eigen::Index d, SeededRng& rng) {
  RVector c(d);
  for (Eigen::Index k = 0; k < d; ++k) c(k) = rng.normal();
  return c / c.norm();
}

struct Rank2StartResult {
  double value = kInfinity;
  RVector c;
};

Rank2StartResult rank2_descend(const NullspaceBasis& nb, RVector c, const Rank2SearchParams& params) {
  Rank2Eval ev = rank2_eval(nb, c);
  double step = 1.0;
  for (int it = 0; it < params.max_iterations; ++it) {
    const RVector g = ev.grad - ev.grad.dot(c) * c;
    const double gnorm = g.norm();
    if (gnorm < params.gradient_tol || ev.value < 1e-30) break;
    bool accepted = false;
    RVector cn;
    Rank2Eval en;
    for (int bt = 0; bt < kMaxBacktracks && step >= kMinStep; ++bt) {
      cn = (c - step * g).normalized();
      en = rank2_eval(nb, cn);
      if (en.value <= ev.value - kArmijo * step * gnorm * gnorm) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    // Barzilai-Borwein trial step for the next iteration.
    const RVector gn = en.grad - en.grad.dot(cn) * cn;
    const RVector s = cn - c;
    const double sy = s.dot(gn - g);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, kMinStep, kMaxStep) : std::min(2.0 * step, kMaxStep);
    c = std::move(cn);
    ev = std::move(en);
  }
  return {ev.value, std::move(c)};
}

std::optional<HermitianMatrix> rescaled_rank2(const NullspaceBasis& nb, const RVector& c, double eig_tol) {
  const HermitianMatrix x = unrealify(nb.coordinates * c, nb.n);
  const HermitianMatrix scaled = x * (std::numbers::sqrt2 / x.frobenius_norm());
  const auto eig = hermitian_eig(scaled);
  const int n = nb.n;
  if (std::abs(eig.values(0) - 1.0) > eig_tol || std::abs(eig.values(n - 1) + 1.0) > eig_tol) {
    return std::nullopt;
  }
  for (int k = 1; k + 1 < n; ++k) {
    if (std::abs(eig.values(k)) > eig_tol) return std::nullopt;
  }
  return scaled;
}

// ---- direct search ---------------------------------------------------------

struct PairState {
  CVector x;
  CVector y;
};

double max_abs(const RVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct DirectStartResult {
  double barrier_residual = kInfinity;
  std::optional<CollisionWitness> witness;
};

// Projected gradient with Armijo backtracking and Barzilai-Borwein steps on
// the product of unit spheres.
PairState direct_descend(const UnitaryEnsemble& e, PairState s, double barrier, int max_iterations,
                         double gradient_tol) {
  auto tangent = [](const CVector& p, const CVector& g) -> CVector {
    return g - p.dot(g).real() * p;  // dot() conjugates its first argument
  };
  DirectObjective ev = direct_objective(e, s.x, s.y, barrier);
  double step = 1e-2;
  for (int it = 0; it < max_iterations; ++it) {
    const CVector gx = tangent(s.x, ev.grad_x);
    const CVector gy = tangent(s.y, ev.grad_y);
    const double gsq = gx.squaredNorm() + gy.squaredNorm();
    if (std::sqrt(gsq) < gradient_tol || ev.value < 1e-300) break;
    bool accepted = false;
    PairState next;
    DirectObjective en;
    for (int bt = 0; bt < kMaxBacktracks && step >= kMinStep * 1e-4; ++bt) {
      next.x = (s.x - step * gx).normalized();
      next.y = (s.y - step * gy).normalized();
      en = direct_objective(e, next.x, next.y, barrier);
      if (std::isfinite(en.value) && en.value <= ev.value - kArmijo * step * gsq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const CVector gxn = tangent(next.x, en.grad_x);
    const CVector gyn = tangent(next.y, en.grad_y);
    const double ss = (next.x - s.x).squaredNorm() + (next.y - s.y).squaredNorm();
    const double sy = (next.x - s.x).dot(gxn - gx).real() + (next.y - s.y).dot(gyn - gy).real();
    step = sy > 0.0 ? std::clamp(ss / sy, kMinStep, kMaxStep) : std::min(2.0 * step, kMaxStep);
    s = std::move(next);
    ev = std::move(en);
  }
  return s;
}

}  // namespace

// ---- nullspace ---------------------------------------------------------------

NullspaceBasis nullspace_basis(const UnitaryEnsemble& e, double rank_tol) {
  const RealifiedOperator op = realified_operator(e, rank_tol);
  const int n = e.n();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * n;
  NullspaceBasis out;
  out.n = n;
  out.operator_rank = op.rank;
  out.dimension = static_cast<int>(dim) - op.rank.rank;
  Eigen::JacobiSVD<RMatrix> svd(op.matrix, Eigen::ComputeFullV);
  out.coordinates = svd.matrixV().rightCols(out.dimension);
  out.basis.reserve(out.dimension);
  for (int k = 0; k < out.dimension; ++k) out.basis.push_back(unrealify(out.coordinates.col(k), n));
  return out;
}

// ---- witnesses ---------------------------------------------------------------

CollisionWitness make_witness(const UnitaryEnsemble& e, const CVector& x, const CVector& y) {
  if (x.size() != e.n() || y.size() != e.n()) throw DimensionMismatch("witness vectors have wrong length");
  CollisionWitness w;
  w.x = x;
  w.y = y;
  const HermitianMatrix diff = HermitianMatrix::outer(x) - HermitianMatrix::outer(y);
  w.lift_distance = diff.frobenius_norm();
  w.measurement_residual = max_abs(measure_state(e, x).values - measure_state(e, y).values);
  if (w.lift_distance > 0.0) {
    w.normalized = diff * (std::numbers::sqrt2 / w.lift_distance);
    w.eigenvalues = hermitian_eig(w.normalized).values;
    w.normalized_residual = max_abs(apply_ensemble(e, w.normalized).values);
  } else {
    w.normalized = HermitianMatrix::zero(e.n());
    w.eigenvalues = RVector::Zero(e.n());
  }
  return w;
}

std::string witness_defect(const CollisionWitness& w, const WitnessTolerances& tol) {
  if (!(w.lift_distance > tol.min_lift_distance)) return "lift distance too small";
  if (!(w.measurement_residual < tol.residual)) return "measurement residual too large";
  if (!(w.normalized_residual < tol.normalized_residual)) return "normalized matrix not in nullspace";
  const auto n = w.eigenvalues.size();
  if (n < 2) return "dimension too small";
  if (std::abs(w.eigenvalues(0) - 1.0) > tol.eigenvalue) return "largest eigenvalue is not 1";
  if (std::abs(w.eigenvalues(n - 1) + 1.0) > tol.eigenvalue) return "smallest eigenvalue is not -1";
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    if (std::abs(w.eigenvalues(k)) > tol.eigenvalue) return "normalized matrix is not rank 2";
  }
  return {};
}

// ---- rank-2 search -------------------------------------------------------------

double middle_eigenvalue_objective(const HermitianMatrix& x) {
  const double norm = x.frobenius_norm();
  if (norm == 0.0) return kInfinity;
  const auto eig = hermitian_eig(x * (1.0 / norm));
  double value = 0.0;
  for (Eigen::Index k = 1; k + 1 < eig.values.size(); ++k) value += eig.values(k) * eig.values(k);
  return value;
}

Rank2SearchResult find_rank2_indefinite(const NullspaceBasis& nb, const Rank2SearchParams& params,
                                        const SeededRng& rng) {
  Rank2SearchResult result;
  if (nb.dimension == 0 || params.starts <= 0) return result;

  std::vector<Rank2StartResult> runs(params.starts);
  std::vector<char> ran(params.starts, 0);
  std::vector<std::optional<HermitianMatrix>> found(params.starts);
  FirstSuccess first;

  for_each_index(params.starts, params.execution, [&](std::ptrdiff_t j) {
    const int start = static_cast<int>(j);
    if (first.beaten_by_lower(start)) return;
    SeededRng local = rng.split(static_cast<std::uint64_t>(start));
    runs[j] = rank2_descend(nb, random_unit_real(nb.dimension, local), params);
    ran[j] = 1;
    if (runs[j].value < params.success_threshold) {
      found[j] = rescaled_rank2(nb, runs[j].c, params.eigenvalue_tol);
      if (found[j]) first.record(start);
    }
  });

  const int winner = first.get();
  if (winner != INT_MAX) {
    result.matrix = found[winner];
    result.objective_floor = runs[winner].value;
    result.winning_start = winner;
    return result;
  }
  for (int j = 0; j < params.starts; ++j) {
    if (ran[j]) result.objective_floor = std::min(result.objective_floor, runs[j].value);
  }
  return result;
}

// ---- direct search -------------------------------------------------------------

DirectObjective direct_objective(const UnitaryEnsemble& e, const CVector& x, const CVector& y,
                                 double barrier) {
  const int n = e.n();
  DirectObjective out;
  out.grad_x = CVector::Zero(n);
  out.grad_y = CVector::Zero(n);
  for (int k = 0; k < e.m(); ++k) {
    const CMatrix& u = e.unitary(k);
    const CVector a = u.conjugate() * x;  // <z_i, x>
    const CVector b = u.conjugate() * y;
    const RVector r = a.cwiseAbs2() - b.cwiseAbs2();
    out.value += r.squaredNorm();
    out.residual_inf = std::max(out.residual_inf, max_abs(r));
    const CVector rc = r.cast<Complex>();
    out.grad_x += 4.0 * u.transpose() * rc.cwiseProduct(a);
    out.grad_y -= 4.0 * u.transpose() * rc.cwiseProduct(b);
  }
  if (barrier > 0.0) {
    const double nx = x.squaredNorm();
    const double ny = y.squaredNorm();
    const Complex xy = x.dot(y);  // x^* y
    const double d = nx * nx + ny * ny - 2.0 * std::norm(xy);
    if (!(d > 0.0)) {
      out.value = kInfinity;
      return out;
    }
    out.value += barrier / d;
    const double coef = -barrier / (d * d);
    // grad_x D = 4|x|^2 x - 4 y (y^* x), grad_y D = 4|y|^2 y - 4 x (x^* y)
    out.grad_x += coef * (4.0 * nx * x - 4.0 * y * std::conj(xy));
    out.grad_y += coef * (4.0 * ny * y - 4.0 * x * xy);
  }
  return out;
}

DirectSearchResult collision_search_direct(const UnitaryEnsemble& e, const DirectSearchParams& params,
                                           const SeededRng& rng) {
  DirectSearchResult result;
  if (params.starts <= 0) return result;
  std::vector<DirectStartResult> runs(params.starts);
  std::vector<char> ran(params.starts, 0);
  FirstSuccess first;

  for_each_index(params.starts, params.execution, [&](std::ptrdiff_t j) {
    const int start = static_cast<int>(j);
    if (first.beaten_by_lower(start)) return;
    SeededRng local = rng.split(static_cast<std::uint64_t>(start));
    PairState s{random_unit_vector(e.n(), local), random_unit_vector(e.n(), local)};
    s = direct_descend(e, std::move(s), params.barrier, params.max_iterations, params.gradient_tol);
    runs[j].barrier_residual = direct_objective(e, s.x, s.y, 0.0).residual_inf;
    ran[j] = 1;
    if (runs[j].barrier_residual < params.polish_gate) {
      s = direct_descend(e, std::move(s), 0.0, params.polish_iterations, params.gradient_tol);
      CollisionWitness w = make_witness(e, s.x, s.y);
      if (witness_defect(w, params.tolerances).empty()) {
        runs[j].witness = std::move(w);
        first.record(start);
      }
    }
  });

  for (int j = 0; j < params.starts; ++j) {
    if (ran[j]) result.best_residual = std::min(result.best_residual, runs[j].barrier_residual);
  }
  const int winner = first.get();
  if (winner != INT_MAX) {
    result.witness = runs[winner].witness;
    result.winning_start = winner;
  }
  return result;
}

// ---- n = 2 oracle ----------------------------------------------------------------

std::string_view to_string(OracleVerdict v) {
  return v == OracleVerdict::injective ? "injective" : "not_injective";
}

Eigen::Vector3d bloch_vector(const CVector& z) {
  if (z.size() != 2) throw PreconditionError("bloch_vector: n must be 2");
  const Complex c = std::conj(z(0)) * z(1);
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(z(0)) - std::norm(z(1))};
}

OracleVerdict bloch_oracle_n2(const UnitaryEnsemble& e) {
  if (e.n() != 2) throw PreconditionError("bloch_oracle_n2: requires n = 2");
  RMatrix s(e.measurement_count(), 3);
  for (int i = 0; i < e.measurement_count(); ++i) s.row(i) = bloch_vector(e.row(i)).transpose();
  return rank_with_tol(s).rank == 3 ? OracleVerdict::injective : OracleVerdict::not_injective;
}

// ---- orbit reduction ---------------------------------------------------------------

OrbitReduction orbit_reduce(const UnitaryEnsemble& e, const CVector& u, const CVector& v) {
  if (e.n() < 2) throw PreconditionError("orbit_reduce: n must be >= 2");
  if (u.size() != e.n() || v.size() != e.n()) throw DimensionMismatch("orbit_reduce: vector length");
  constexpr double tol = 1e-8;
  if (std::abs(u.norm() - 1.0) > tol || std::abs(v.norm() - 1.0) > tol || std::abs(u.dot(v)) > tol) {
    throw PreconditionError("orbit_reduce: witness vectors are not orthonormal");
  }
  CMatrix cols(e.n(), 2);
  cols << u.conjugate(), v.conjugate();
  CMatrix unitary = complete_to_unitary(cols);
  UnitaryEnsemble reduced = e.right_multiplied(unitary);
  CMatrix target = CMatrix::Zero(e.n(), e.n());
  target(0, 0) = 1.0;
  target(1, 1) = -1.0;
  const double residual = max_abs(apply_ensemble(reduced, HermitianMatrix(target)).values);
  return {std::move(unitary), std::move(reduced), residual};
}

OrbitReduction orbit_reduce(const UnitaryEnsemble& e, const CollisionWitness& w) {
  const auto eig = hermitian_eig(w.normalized);
  return orbit_reduce(e, eig.vectors.col(0), eig.vectors.col(e.n() - 1));
}

// ---- certification -------------------------------------------------------------------

std::string_view to_string(Verdict v) {
  return v == Verdict::collision_found ? "collision_found" : "no_collision_found";
}

CertificationReport certify(const UnitaryEnsemble& e, const CertifyConfig& config, const SeededRng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  CertificationReport report;
  report.n = e.n();
  report.m = e.m();
  report.seed = rng.seed();
  report.stream = rng.stream();
  report.config = config;

  const NullspaceBasis nb = nullspace_basis(e, config.rank_tol);
  report.nullspace_dimension = nb.dimension;
  report.searches_skipped = nb.dimension == 0 && config.skip_search_when_nullspace_empty;

  if (!report.searches_skipped) {
    const Rank2SearchResult r2 = find_rank2_indefinite(nb, config.rank2, rng.split(1));
    report.search_floor = r2.objective_floor;
    if (r2.matrix) {
      const auto eig = hermitian_eig(*r2.matrix);
      CollisionWitness w = make_witness(e, eig.vectors.col(0), eig.vectors.col(e.n() - 1));
      if (witness_defect(w, config.witness).empty()) {
        report.witness = std::move(w);
        report.witness_source = "rank2";
      }
    }
    const DirectSearchResult direct = collision_search_direct(e, config.direct, rng.split(2));
    report.direct_search_floor = direct.best_residual;
    if (!report.witness && direct.witness && witness_defect(*direct.witness, config.witness).empty()) {
      report.witness = direct.witness;
      report.witness_source = "direct";
    }
  }
  report.verdict = report.witness ? Verdict::collision_found : Verdict::no_collision_found;

  if (e.n() == 2) {
    report.oracle_verdict = bloch_oracle_n2(e);
    const bool oracle_injective = *report.oracle_verdict == OracleVerdict::injective;
    if (oracle_injective == (report.verdict == Verdict::collision_found)) {
      throw InternalError("certify: verdict disagrees with the exact n = 2 oracle");
    }
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace qtomo
