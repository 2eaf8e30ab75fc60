#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qtomo/errors.hpp"
#include "qtomo/linalg.hpp"
#include "qtomo/measurement.hpp"

using namespace qtomo;

namespace {

HermitianMatrix random_hermitian(int n, SeededRng& rng) {
  CMatrix g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = rng.complex_normal();
  return HermitianMatrix(0.5 * (g + g.adjoint()));
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  SeededRng a(7, 3), b(7, 3);
  for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
  SeededRng d(7, 3), e(7, 4);
  int equal = 0;
  for (int k = 0; k < 100; ++k) equal += d.next_u64() == e.next_u64();
  CHECK(equal == 0);
  CHECK(SeededRng(1).split(5).stream() == SeededRng(1).split(5).stream());
  CHECK(SeededRng(1).split(5).stream() != SeededRng(1).split(6).stream());
}

TEST_CASE("rng moments") {
  SeededRng rng(11);
  double sum = 0.0, sum_sq = 0.0, cmod = 0.0;
  const int count = 200000;
  for (int k = 0; k < count; ++k) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
    cmod += std::norm(rng.complex_normal());
  }
  CHECK(std::abs(sum / count) < 0.01);
  CHECK(std::abs(sum_sq / count - 1.0) < 0.01);
  CHECK(std::abs(cmod / count - 1.0) < 0.01);
}

TEST_CASE("haar_unitary examples") {
  SeededRng rng(1);
  SUBCASE("n = 1 is a unit-modulus scalar") {
    const CMatrix u = haar_unitary(1, rng);
    CHECK(std::abs(std::abs(u(0, 0)) - 1.0) < 1e-12);
  }
  SUBCASE("n = 8 is unitary") { CHECK(unitarity_defect(haar_unitary(8, rng)) < 1e-12); }
  SUBCASE("unitary to 1e-12 for every n up to 64") {
    for (int n = 1; n <= 64; ++n) CHECK(unitarity_defect(haar_unitary(n, rng)) < 1e-12);
  }
  SUBCASE("n = 0 rejected") { CHECK_THROWS_AS(haar_unitary(0, rng), PreconditionError); }
}

TEST_CASE("haar_unitary second moment matches 1/n") {
  // E|U_11|^2 = 1/n for Haar measure; n = 4, 10^4 draws.
  SeededRng rng(2024);
  double mean = 0.0;
  const int samples = 10000;
  for (int k = 0; k < samples; ++k) mean += std::norm(haar_unitary(4, rng)(0, 0));
  mean /= samples;
  CHECK(mean >= 0.24);
  CHECK(mean <= 0.26);
}

TEST_CASE("haar_unitary fourth moment matches Haar, not the uncorrected QR") {
  // E|U_11|^4 = 2 / (n (n + 1)) under Haar measure.
  SeededRng rng(99);
  double m4 = 0.0;
  const int samples = 20000;
  for (int k = 0; k < samples; ++k) m4 += std::pow(std::norm(haar_unitary(3, rng)(0, 0)), 2);
  m4 /= samples;
  CHECK(std::abs(m4 - 2.0 / 12.0) < 0.01);
}

TEST_CASE("haar_unitary is deterministic per stream") {
  SeededRng a(5, 1), b(5, 1);
  CHECK((haar_unitary(6, a) - haar_unitary(6, b)).norm() == 0.0);
}

TEST_CASE("hermitian_eig examples") {
  SUBCASE("diagonal") {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 3.0;
    const auto eig = hermitian_eig(d);
    CHECK(eig.values(0) == doctest::Approx(3.0));
    CHECK(eig.values(1) == doctest::Approx(1.0));
  }
  SUBCASE("rank-one projector") {
    SeededRng rng(3);
    const CVector x = random_unit_vector(5, rng);
    const auto eig = hermitian_eig(HermitianMatrix::outer(x));
    CHECK(std::abs(eig.values(0) - 1.0) < 1e-12);
    for (int k = 1; k < 5; ++k) CHECK(std::abs(eig.values(k)) < 1e-12);
  }
  SUBCASE("e1e1* - e2e2*") {
    CMatrix x = CMatrix::Zero(4, 4);
    x(0, 0) = 1.0;
    x(1, 1) = -1.0;
    const auto eig = hermitian_eig(x);
    CHECK(std::abs(eig.values(0) - 1.0) < 1e-14);
    CHECK(std::abs(eig.values(1)) < 1e-14);
    CHECK(std::abs(eig.values(2)) < 1e-14);
    CHECK(std::abs(eig.values(3) + 1.0) < 1e-14);
  }
  SUBCASE("non-Hermitian input rejected") {
    CMatrix x = CMatrix::Zero(2, 2);
    x(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eig(x), PreconditionError);
  }
}

TEST_CASE("hermitian_eig reconstructs random matrices") {
  SeededRng rng(17);
  for (int n = 2; n <= 16; ++n) {
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const HermitianMatrix h = random_hermitian(n, rng);
      const auto eig = hermitian_eig(h);
      const CMatrix rebuilt = eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
      worst = std::max(worst, (rebuilt - h.matrix()).norm() / h.frobenius_norm());
      for (int k = 1; k < n; ++k) REQUIRE(eig.values(k - 1) >= eig.values(k));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("rank_with_tol examples") {
  CHECK(rank_with_tol(RMatrix(RMatrix::Identity(5, 5))).rank == 5);
  const auto zero = rank_with_tol(RMatrix(RMatrix::Zero(3, 4)));
  CHECK(zero.rank == 0);
  CHECK(zero.singular_values.size() == 3);
  CHECK_THROWS_AS(rank_with_tol(RMatrix(RMatrix::Constant(2, 2, std::nan("")))), PreconditionError);
}

TEST_CASE("realified operator of a Haar 4-tuple at n = 4 has rank 13") {
  // Oracle: operator assembled from trace definitions, rank by pivoted QR.
  SeededRng rng(401);
  for (int trial = 0; trial < 50; ++trial) {
    const auto e = UnitaryEnsemble::haar(4, 4, rng);
    CHECK(oracle::qr_rank(oracle::measurement_operator(e)) == 13);
    CHECK(rank_with_tol(realified_operator(e).matrix).rank == 13);
  }
}

TEST_CASE("rank is invariant under unitary multiplication") {
  SeededRng rng(23);
  for (int t = 0; t < 100; ++t) {
    CMatrix low = CMatrix::Zero(6, 6);
    for (int k = 0; k < 3; ++k) {
      const CVector a = random_unit_vector(6, rng);
      const CVector b = random_unit_vector(6, rng);
      low += a * b.adjoint();
    }
    const int r0 = rank_with_tol(low).rank;
    CHECK(r0 == 3);
    CHECK(rank_with_tol(CMatrix(haar_unitary(6, rng) * low)).rank == r0);
    CHECK(rank_with_tol(CMatrix(low * haar_unitary(6, rng))).rank == r0);
  }
}

TEST_CASE("complete_to_unitary keeps the given columns") {
  SeededRng rng(8);
  const CMatrix base = haar_unitary(5, rng);
  const CMatrix cols = base.leftCols(2);
  const CMatrix u = complete_to_unitary(cols);
  CHECK(unitarity_defect(u) < 1e-12);
  CHECK((u.leftCols(2) - cols).norm() < 1e-12);
}

TEST_CASE("HermitianMatrix validates") {
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = Complex(0.0, 1.0);
  bad(1, 0) = Complex(0.0, 1.0);
  CHECK_THROWS_AS(HermitianMatrix{bad}, PreconditionError);
  CHECK_THROWS_AS(HermitianMatrix{CMatrix(2, 3)}, PreconditionError);
  SeededRng rng(4);
  const CVector x = random_unit_vector(3, rng);
  CHECK(HermitianMatrix::outer(x).trace() == doctest::Approx(1.0));
}
