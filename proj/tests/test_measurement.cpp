#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qtomo/ensemble_io.hpp"
#include "qtomo/errors.hpp"
#include "qtomo/measurement.hpp"

using namespace qtomo;

namespace {

HermitianMatrix random_hermitian(int n, SeededRng& rng) {
  CMatrix g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = rng.complex_normal();
  return HermitianMatrix(0.5 * (g + g.adjoint()));
}

UnitaryEnsemble identity_first(int n, SeededRng& rng) {
  std::vector<CMatrix> us{CMatrix::Identity(n, n)};
  for (int k = 1; k < 4; ++k) us.push_back(haar_unitary(n, rng));
  return UnitaryEnsemble(us, Provenance::explicit_);
}

}  // namespace

TEST_CASE("apply_ensemble examples") {
  SeededRng rng(1);
  const auto e = identity_first(4, rng);
  SUBCASE("e1 e1* reads out the first basis row") {
    CMatrix x = CMatrix::Zero(4, 4);
    x(0, 0) = 1.0;
    const auto mv = apply_ensemble(e, HermitianMatrix(x));
    CHECK(std::abs(mv.values(0) - 1.0) < 1e-15);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(mv.values(i)) < 1e-15);
  }
  SUBCASE("e1 e1* - e2 e2* reads (1, -1, 0, 0)") {
    CMatrix x = CMatrix::Zero(4, 4);
    x(0, 0) = 1.0;
    x(1, 1) = -1.0;
    const auto mv = apply_ensemble(e, HermitianMatrix(x));
    CHECK(mv.values(0) == doctest::Approx(1.0));
    CHECK(mv.values(1) == doctest::Approx(-1.0));
    CHECK(std::abs(mv.values(2)) < 1e-15);
    CHECK(std::abs(mv.values(3)) < 1e-15);
  }
  SUBCASE("rank-one blocks sum to the squared norm") {
    CVector x(4);
    for (int k = 0; k < 4; ++k) x(k) = rng.complex_normal();
    const auto mv = apply_ensemble(e, HermitianMatrix::outer(x));
    for (int k = 0; k < 4; ++k) CHECK(std::abs(mv.block_sum(k) - x.squaredNorm()) < 1e-12);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(apply_ensemble(e, HermitianMatrix::zero(3)), DimensionMismatch);
  }
}

TEST_CASE("apply_ensemble agrees with the trace definition") {
  SeededRng rng(2);
  for (int n = 1; n <= 7; ++n) {
    const auto e = UnitaryEnsemble::haar(n, 4, rng);
    const auto h = random_hermitian(n, rng);
    const auto mv = apply_ensemble(e, h);
    for (int i = 0; i < e.measurement_count(); ++i) {
      CHECK(std::abs(mv.values(i) - oracle::trace_measurement(e.row(i), h.matrix())) < 1e-12);
    }
  }
}

TEST_CASE("measurement properties on random inputs") {
  SeededRng rng(3);
  for (int n = 2; n <= 8; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto e = UnitaryEnsemble::haar(n, 4, rng);
      const auto x = random_hermitian(n, rng);
      const auto y = random_hermitian(n, rng);
      const double a = rng.normal(), b = rng.normal();
      const auto ax = apply_ensemble(e, x).values;
      const auto ay = apply_ensemble(e, y).values;

      for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(ax.segment(k * n, n).sum() - x.trace()) < 1e-10 * x.frobenius_norm());
      }
      const auto combo = apply_ensemble(e, x * a + y * b).values;
      CHECK((combo - (a * ax + b * ay)).cwiseAbs().maxCoeff() < 1e-10);

      CVector v(n);
      for (int k = 0; k < n; ++k) v(k) = rng.complex_normal();
      const auto psd = apply_ensemble(e, HermitianMatrix::outer(v));
      CHECK(psd.values.minCoeff() >= -1e-12);
      CHECK((psd.values - measure_state(e, v).values).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("right-orbit covariance") {
  // With value_i = z_i^* X z_i and z_i the i-th row of U_k, the rows of U_k V
  // are V^T z_i, so apply(E V, X) = apply(E, conj(V) X V^T).
  SeededRng rng(4);
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto e = UnitaryEnsemble::haar(n, 4, rng);
      const CMatrix v = haar_unitary(n, rng);
      const auto x = random_hermitian(n, rng);
      const auto lhs = apply_ensemble(e.right_multiplied(v), x).values;
      const HermitianMatrix moved(CMatrix(v.conjugate() * x.matrix() * v.transpose()), 1e-10);
      const auto rhs = apply_ensemble(e, moved).values;
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("realification") {
  SeededRng rng(5);
  for (int n = 1; n <= 8; ++n) {
    const auto x = random_hermitian(n, rng);
    const auto y = random_hermitian(n, rng);
    const double inner = realify(x).dot(realify(y));
    CHECK(std::abs(inner - (x.matrix() * y.matrix()).trace().real()) < 1e-12 * (1.0 + std::abs(inner)));
    CHECK((unrealify(realify(x), n).matrix() - x.matrix()).norm() < 1e-14);

    const auto e = UnitaryEnsemble::haar(n, 4, rng);
    const auto op = realified_operator(e);
    CHECK(op.matrix.rows() == 4 * n);
    CHECK(op.matrix.cols() == n * n);
    CHECK((op.matrix * realify(x) - apply_ensemble(e, x).values).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((op.matrix - oracle::measurement_operator(e)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rank law on Haar ensembles") {
  SeededRng rng(6);
  for (int n = 2; n <= 12; ++n) {
    const int expected = std::min(n * n, 4 * n - 3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto e = UnitaryEnsemble::haar(n, 4, rng);
      REQUIRE(realified_operator(e).rank.rank == expected);
    }
  }
}

TEST_CASE("diagonal ensemble at n = 3 has rank 3") {
  SeededRng rng(7);
  const auto e = structured_ensemble(StructuredKind::diagonal, 3, rng);
  CHECK(realified_operator(e).rank.rank == 3);
  CHECK(oracle::qr_rank(oracle::measurement_operator(e)) == 3);
}

TEST_CASE("embedding map") {
  SeededRng rng(8);
  SUBCASE("phase and scale invariance") {
    for (int n = 2; n <= 6; ++n) {
      const auto e = UnitaryEnsemble::haar(n, 4, rng);
      CVector x(n);
      for (int k = 0; k < n; ++k) x(k) = rng.complex_normal();
      const Complex c = std::polar(2.5, rng.angle());
      const RVector a = embedding_map(e, x);
      CHECK(a.size() == 4 * (n - 1));
      CHECK((a - embedding_map(e, c * x)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((a - embedding_map(e, std::polar(1.0, 0.7) * x)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("n = 1 maps to the empty vector") {
    const auto e = UnitaryEnsemble::haar(1, 4, rng);
    CVector x(1);
    x(0) = Complex(0.3, 0.4);
    CHECK(embedding_map(e, x).size() == 0);
  }
  SUBCASE("zero vector rejected") {
    const auto e = UnitaryEnsemble::haar(3, 4, rng);
    CHECK_THROWS_AS(embedding_map(e, CVector::Zero(3)), PreconditionError);
  }
  SUBCASE("n = 2 separates distinct projective points") {
    const auto e = UnitaryEnsemble::haar(2, 4, rng);
    double min_distance = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
      const CVector x = random_unit_vector(2, rng);
      const CVector y = random_unit_vector(2, rng);
      if ((HermitianMatrix::outer(x) - HermitianMatrix::outer(y)).frobenius_norm() < 1e-3) continue;
      min_distance = std::min(min_distance, (embedding_map(e, x) - embedding_map(e, y)).norm());
    }
    CHECK(min_distance > 0.0);
  }
  SUBCASE("differential has rank 2(n - 1)") {
    for (int n = 2; n <= 5; ++n) {
      const auto e = UnitaryEnsemble::haar(n, 4, rng);
      CHECK(embedding_differential_rank(e, random_unit_vector(n, rng)).rank == 2 * (n - 1));
    }
  }
}

TEST_CASE("complete_dropped_block") {
  RVector one(1);
  one << 1.0;
  const RVector a = complete_dropped_block(one, 1.0);
  CHECK(a.size() == 2);
  CHECK(a(0) == 1.0);
  CHECK(a(1) == 0.0);

  RVector quarters(2);
  quarters << 0.25, 0.25;
  const RVector b = complete_dropped_block(quarters, 1.0);
  CHECK(b(2) == doctest::Approx(0.5));

  RVector too_much(2);
  too_much << 0.75, 0.5;
  CHECK_THROWS_AS(complete_dropped_block(too_much, 1.0), InconsistencyError);

  SeededRng rng(9);
  for (int n = 2; n <= 8; ++n) {
    const auto e = UnitaryEnsemble::haar(n, 4, rng);
    CVector x(n);
    for (int k = 0; k < n; ++k) x(k) = rng.complex_normal();
    const auto mv = measure_state(e, x);
    for (int k = 0; k < 4; ++k) {
      const RVector block = mv.block(k);
      const RVector rebuilt = complete_dropped_block(block.head(n - 1), x.squaredNorm());
      CHECK((rebuilt - block).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("minimum measurement lower bound") {
  CHECK(min_measurement_lower_bound(6) == 16);
  CHECK(min_measurement_lower_bound(2) == 2);
  CHECK(min_measurement_lower_bound(9) == 30);
  CHECK(min_measurement_lower_bound(3) == 6);
  CHECK_THROWS_AS(min_measurement_lower_bound(1), PreconditionError);
}

TEST_CASE("structured ensembles") {
  SeededRng rng(10);
  SUBCASE("diagonal n = 2 only sees moduli") {
    const auto e = structured_ensemble(StructuredKind::diagonal, 2, rng);
    CVector x(2), y(2);
    x << Complex(0.6, 0.0), Complex(0.0, 0.8);
    y << Complex(-0.6, 0.0), Complex(0.8 * std::cos(1.1), 0.8 * std::sin(1.1));
    CHECK((measure_state(e, x).values - measure_state(e, y).values).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("shared eigenbasis n = 3 gives equal blocks") {
    const auto e = structured_ensemble(StructuredKind::shared_eigenbasis, 3, rng);
    const auto mv = measure_state(e, random_unit_vector(3, rng));
    for (int k = 1; k < 4; ++k) CHECK((mv.block(k) - mv.block(0)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("fourier masked n = 4 is a valid ensemble") {
    const auto e = structured_ensemble(StructuredKind::fourier_masked, 4, rng);
    CHECK(e.m() == 4);
    for (const auto& u : e.unitaries()) CHECK(unitarity_defect(u) < 1e-10);
    CHECK(e.provenance() == Provenance::fourier_masked);
  }
  SUBCASE("n = 1 rejected") {
    CHECK_THROWS_AS(structured_ensemble(StructuredKind::diagonal, 1, rng), PreconditionError);
  }
}

TEST_CASE("ensemble validation") {
  CMatrix bad = CMatrix::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(UnitaryEnsemble({bad}, Provenance::explicit_), PreconditionError);
  CHECK_THROWS_AS(UnitaryEnsemble({CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}, Provenance::explicit_),
                  PreconditionError);
}

TEST_CASE("ensemble text format round-trips exactly") {
  SeededRng rng(11);
  const auto e = UnitaryEnsemble::haar(5, 4, rng);
  std::stringstream ss;
  write_ensemble(ss, e);
  const auto back = read_ensemble(ss);
  CHECK(back.n() == 5);
  CHECK(back.m() == 4);
  CHECK(back.provenance() == Provenance::haar);
  for (int k = 0; k < 4; ++k) CHECK((back.unitary(k) - e.unitary(k)).cwiseAbs().maxCoeff() == 0.0);

  const auto path = std::filesystem::temp_directory_path() / "qtomo_test_ensemble.txt";
  save_ensemble(path, e);
  const auto loaded = load_ensemble(path);
  for (int k = 0; k < 4; ++k) CHECK((loaded.unitary(k) - e.unitary(k)).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);

  std::stringstream broken("2 1 haar\n1,0 0,0\n");
  CHECK_THROWS(read_ensemble(broken));
}
