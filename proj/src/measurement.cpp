#include "qtomo/measurement.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qtomo/errors.hpp"

namespace qtomo {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::haar: return "haar";
    case Provenance::diagonal: return "diagonal";
    case Provenance::shared_eigenbasis: return "shared-eigenbasis";
    case Provenance::fourier_masked: return "fourier-masked";
    case Provenance::explicit_: return "explicit";
  }
  return "explicit";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "haar") return Provenance::haar;
  if (s == "diagonal") return Provenance::diagonal;
  if (s == "shared-eigenbasis") return Provenance::shared_eigenbasis;
  if (s == "fourier-masked") return Provenance::fourier_masked;
  if (s == "explicit") return Provenance::explicit_;
  throw PreconditionError("unknown provenance '" + std::string(s) + "'");
}

StructuredKind structured_kind_from_string(std::string_view s) {
  if (s == "diagonal") return StructuredKind::diagonal;
  if (s == "shared-eigenbasis") return StructuredKind::shared_eigenbasis;
  if (s == "fourier-masked") return StructuredKind::fourier_masked;
  throw PreconditionError("unknown structured ensemble kind '" + std::string(s) + "'");
}

UnitaryEnsemble::UnitaryEnsemble(std::vector<CMatrix> unitaries, Provenance provenance)
    : n_(0), unitaries_(std::move(unitaries)), provenance_(provenance) {
  if (unitaries_.empty()) throw PreconditionError("ensemble needs at least one unitary");
  n_ = static_cast<int>(unitaries_.front().rows());
  if (n_ < 1) throw PreconditionError("ensemble dimension must be positive");
  for (const auto& u : unitaries_) {
    if (u.rows() != n_ || u.cols() != n_) throw DimensionMismatch("ensemble members differ in shape");
    if (!u.allFinite()) throw PreconditionError("ensemble member has non-finite entries");
    const double defect = unitarity_defect(u);
    if (defect >= kEnsembleUnitarityTol) {
      throw PreconditionError("ensemble member is not unitary (defect " + std::to_string(defect) + ")");
    }
  }
}

UnitaryEnsemble UnitaryEnsemble::haar(int n, int m, SeededRng& rng) {
  if (m < 1) throw PreconditionError("ensemble size m must be >= 1");
  std::vector<CMatrix> us;
  us.reserve(m);
  for (int k = 0; k < m; ++k) us.push_back(haar_unitary(n, rng));
  return UnitaryEnsemble(std::move(us), Provenance::haar);
}

CVector UnitaryEnsemble::row(int index) const {
  if (index < 0 || index >= measurement_count()) throw PreconditionError("row index out of range");
  return unitaries_[index / n_].row(index % n_).transpose();
}

UnitaryEnsemble UnitaryEnsemble::right_multiplied(const CMatrix& u) const {
  if (u.rows() != n_ || u.cols() != n_) throw DimensionMismatch("right factor has wrong shape");
  std::vector<CMatrix> out;
  out.reserve(unitaries_.size());
  for (const auto& a : unitaries_) out.push_back(a * u);
  return UnitaryEnsemble(std::move(out), Provenance::explicit_);
}

MeasurementVector apply_ensemble(const UnitaryEnsemble& e, const HermitianMatrix& x) {
  if (x.size() != e.n()) throw DimensionMismatch("apply_ensemble: state dimension differs from ensemble");
  MeasurementVector out{e.n(), e.m(), RVector(e.measurement_count())};
  for (int k = 0; k < e.m(); ++k) {
    const CMatrix& u = e.unitary(k);
    const CMatrix left = u.conjugate() * x.matrix();
    out.values.segment(static_cast<Eigen::Index>(k) * e.n(), e.n()) =
        left.cwiseProduct(u).rowwise().sum().real();
  }
  return out;
}

MeasurementVector measure_state(const UnitaryEnsemble& e, const CVector& x) {
  if (x.size() != e.n()) throw DimensionMismatch("measure_state: state dimension differs from ensemble");
  MeasurementVector out{e.n(), e.m(), RVector(e.measurement_count())};
  for (int k = 0; k < e.m(); ++k) {
    out.values.segment(static_cast<Eigen::Index>(k) * e.n(), e.n()) =
        (e.unitary(k).conjugate() * x).cwiseAbs2();
  }
  return out;
}

MeasurementVector clamp_dust(MeasurementVector mv, double dust) {
  for (auto& v : mv.values) {
    if (v < 0.0 && v > -dust) v = 0.0;
  }
  return mv;
}

RVector realify(const HermitianMatrix& x) {
  const int n = x.size();
  const int pairs = n * (n - 1) / 2;
  RVector out(static_cast<Eigen::Index>(n) * n);
  const CMatrix& m = x.matrix();
  for (int k = 0; k < n; ++k) out(k) = m(k, k).real();
  int p = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l, ++p) {
      out(n + p) = std::numbers::sqrt2 * m(k, l).real();
      out(n + pairs + p) = std::numbers::sqrt2 * m(k, l).imag();
    }
  }
  return out;
}

HermitianMatrix unrealify(const RVector& coords, int n) {
  if (n < 1 || coords.size() != static_cast<Eigen::Index>(n) * n) {
    throw DimensionMismatch("unrealify: coordinate length must be n^2");
  }
  const int pairs = n * (n - 1) / 2;
  CMatrix m = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = coords(k);
  int p = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l, ++p) {
      const Complex v(coords(n + p), coords(n + pairs + p));
      m(k, l) = v / std::numbers::sqrt2;
      m(l, k) = std::conj(v) / std::numbers::sqrt2;
    }
  }
  return HermitianMatrix(m);
}

RealifiedOperator realified_operator(const UnitaryEnsemble& e, double rank_tol) {
  const int n = e.n();
  const int pairs = n * (n - 1) / 2;
  RMatrix a(e.measurement_count(), static_cast<Eigen::Index>(n) * n);
  for (int i = 0; i < e.measurement_count(); ++i) {
    const CVector z = e.row(i);
    for (int k = 0; k < n; ++k) a(i, k) = std::norm(z(k));
    int p = 0;
    for (int k = 0; k < n; ++k) {
      for (int l = k + 1; l < n; ++l, ++p) {
        const Complex c = std::conj(z(k)) * z(l);
        a(i, n + p) = std::numbers::sqrt2 * c.real();
        a(i, n + pairs + p) = -std::numbers::sqrt2 * c.imag();
      }
    }
  }
  RealifiedOperator out{std::move(a), {}};
  out.rank = rank_with_tol(out.matrix, rank_tol);
  return out;
}

RVector embedding_map(const UnitaryEnsemble& e, const CVector& x) {
  if (x.size() != e.n()) throw DimensionMismatch("embedding_map: state dimension differs from ensemble");
  const double norm_sq = x.squaredNorm();
  if (!(norm_sq > 0.0)) throw PreconditionError("embedding_map: zero vector");
  const int n = e.n();
  RVector out(static_cast<Eigen::Index>(e.m()) * (n - 1));
  for (int k = 0; k < e.m(); ++k) {
    const RVector block = (e.unitary(k).conjugate() * x).cwiseAbs2() / norm_sq;
    out.segment(static_cast<Eigen::Index>(k) * (n - 1), n - 1) = block.head(n - 1);
  }
  return out;
}

RankReport embedding_differential_rank(const UnitaryEnsemble& e, const CVector& x, double step,
                                       double rel_tol) {
  const int n = e.n();
  RMatrix jac(static_cast<Eigen::Index>(e.m()) * (n - 1), 2 * n);
  for (int c = 0; c < 2 * n; ++c) {
    CVector dx = CVector::Zero(n);
    dx(c % n) = (c < n) ? Complex(step, 0.0) : Complex(0.0, step);
    jac.col(c) = (embedding_map(e, x + dx) - embedding_map(e, x - dx)) / (2.0 * step);
  }
  return rank_with_tol(jac, rel_tol);
}

RVector complete_dropped_block(const RVector& partial, double norm_sq, double tol) {
  if (!(norm_sq > 0.0)) throw PreconditionError("complete_dropped_block: norm_sq must be positive");
  if ((partial.array() < 0.0).any()) throw PreconditionError("complete_dropped_block: negative intensity");
  const double sum = partial.sum();
  if (sum > norm_sq + tol) {
    throw InconsistencyError("complete_dropped_block: partial sum " + std::to_string(sum) +
                             " exceeds squared norm " + std::to_string(norm_sq));
  }
  RVector out(partial.size() + 1);
  out << partial, norm_sq - sum;
  return out;
}

int min_measurement_lower_bound(int n) {
  if (n < 2) throw PreconditionError("min_measurement_lower_bound: n must be >= 2");
  const int alpha = std::popcount(static_cast<unsigned>(n - 1));
  return 4 * n - 2 * alpha - 4;
}

CMatrix fourier_matrix(int n) {
  CMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // j*k reduced mod n keeps |angle| below 2pi.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / n;
      f(j, k) = std::polar(scale, angle);
    }
  }
  return f;
}

UnitaryEnsemble structured_ensemble(StructuredKind kind, int n, SeededRng& rng, int m) {
  if (n < 2) throw PreconditionError("structured_ensemble: n must be >= 2");
  if (m < 1) throw PreconditionError("structured_ensemble: m must be >= 1");
  auto random_phases = [&] {
    CMatrix d = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) d(k, k) = std::polar(1.0, rng.angle());
    return d;
  };
  std::vector<CMatrix> us;
  us.reserve(m);
  switch (kind) {
    case StructuredKind::diagonal:
      for (int k = 0; k < m; ++k) us.push_back(random_phases());
      return UnitaryEnsemble(std::move(us), Provenance::diagonal);
    case StructuredKind::shared_eigenbasis: {
      const CMatrix v = haar_unitary(n, rng);
      for (int k = 0; k < m; ++k) us.push_back(random_phases() * v);
      return UnitaryEnsemble(std::move(us), Provenance::shared_eigenbasis);
    }
    case StructuredKind::fourier_masked: {
      const CMatrix f = fourier_matrix(n);
      for (int k = 0; k < m; ++k) us.push_back(f * random_phases());
      return UnitaryEnsemble(std::move(us), Provenance::fourier_masked);
    }
  }
  throw PreconditionError("structured_ensemble: unknown kind");
}

}  // namespace qtomo
