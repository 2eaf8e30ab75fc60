#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qtomo/errors.hpp"
#include "qtomo/injectivity.hpp"
#include "qtomo/recovery.hpp"

using namespace qtomo;

namespace {

CVector random_state(int n, SeededRng& rng) {
  CVector x(n);
  for (int k = 0; k < n; ++k) x(k) = rng.complex_normal();
  return x;
}

}  // namespace

TEST_CASE("dist_mod_phase examples") {
  SeededRng rng(1);
  const CVector x = random_state(5, rng);
  CHECK(dist_mod_phase(x, std::polar(1.0, 2.1) * x) < 1e-12);
  CVector e1 = CVector::Zero(3), e2 = CVector::Zero(3);
  e1(0) = 1.0;
  e2(1) = 1.0;
  CHECK(dist_mod_phase(e1, e2) == doctest::Approx(std::sqrt(2.0)));
  for (int t = 0; t < 100; ++t) {
    const CVector a = random_state(4, rng), b = random_state(4, rng);
    CHECK(std::abs(dist_mod_phase(a, b) - dist_mod_phase(b, a)) < 1e-12);
    // Oracle: brute-force minimum over a fine phase grid bounds the result from above.
    double grid = kInfinity;
    for (int k = 0; k < 720; ++k) grid = std::min(grid, (a - std::polar(1.0, k * M_PI / 360.0) * b).norm());
    CHECK(dist_mod_phase(a, b) <= grid + 1e-12);
    CHECK(dist_mod_phase(a, b) >= grid - 1e-2);
  }
}

TEST_CASE("spectral initializer") {
  SeededRng rng(2);
  SUBCASE("basis state with an identity member") {
    for (int t = 0; t < 50; ++t) {
      std::vector<CMatrix> us{CMatrix::Identity(4, 4)};
      for (int k = 1; k < 4; ++k) us.push_back(haar_unitary(4, rng));
      const UnitaryEnsemble e(us, Provenance::explicit_);
      CVector x = CVector::Zero(4);
      x(0) = 1.0;
      CHECK(std::abs(spectral_init(e, measure_state(e, x))(0)) > 0.5);
    }
  }
  SUBCASE("random states at n = 8") {
    // Oracle: top eigenvector of the explicitly summed rank-one matrices.
    // With 32 intensities the correlation exceeds 0.8 in about 82% of
    // draws (independent 4000-trial estimate), so 75/100 is ~2 sigma low.
    int good = 0;
    for (int t = 0; t < 100; ++t) {
      const auto e = UnitaryEnsemble::haar(8, 4, rng);
      const CVector x = random_state(8, rng);
      const auto b = measure_state(e, x);
      const CVector init = spectral_init(e, b);
      CMatrix m = CMatrix::Zero(8, 8);
      for (int i = 0; i < e.measurement_count(); ++i) {
        const CVector z = e.row(i);
        m += std::norm(z.dot(x)) * z * z.adjoint();
      }
      Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
      CHECK(std::abs(init.norm() - 1.0) < 1e-12);
      CHECK(std::abs(std::abs(init.dot(es.eigenvectors().col(7))) - 1.0) < 1e-8);
      good += std::abs(init.dot(x)) / x.norm() > 0.8;
    }
    CHECK(good >= 75);
  }
  SUBCASE("all-zero measurements rejected") {
    const auto e = UnitaryEnsemble::haar(3, 4, rng);
    MeasurementVector b{3, 4, RVector::Zero(12)};
    CHECK_THROWS_AS(spectral_init(e, b), PreconditionError);
  }
}

TEST_CASE("intensity gradient matches finite differences") {
  SeededRng rng(3);
  for (const int n : {2, 4, 8}) {
    for (int t = 0; t < 100; ++t) {
      const auto e = UnitaryEnsemble::haar(n, 4, rng);
      MeasurementVector b = measure_state(e, random_state(n, rng));
      for (Eigen::Index i = 0; i < b.values.size(); ++i) b.values(i) += 0.1 * std::abs(rng.normal());
      const CVector x = random_state(n, rng);
      const CVector g = intensity_gradient(e, b, x);
      RVector at(2 * n);
      at << x.real(), x.imag();
      const auto f = [&](const RVector& c) {
        CVector xx(n);
        for (int k = 0; k < n; ++k) xx(k) = Complex(c(k), c(n + k));
        RVector out(1);
        out(0) = intensity_loss(e, b, xx);
        return out;
      };
      RVector analytic(2 * n);
      analytic << g.real(), g.imag();
      const RVector fd = oracle::fd_jacobian(f, at).row(0).transpose();
      REQUIRE((fd - analytic).norm() <= 1e-6 * std::max(1.0, analytic.norm()));
    }
  }
}

TEST_CASE("lifted solver at n = 4") {
  SeededRng rng(4);
  RecoveryConfig cfg;
  for (int t = 0; t < 5; ++t) {
    const auto e = UnitaryEnsemble::haar(4, 4, rng);
    const CVector x = random_unit_vector(4, rng);
    const auto sol = phaselift_solve(e, measure_state(e, x), cfg);
    CHECK((sol.estimate.matrix() - HermitianMatrix::outer(x).matrix()).norm() < 1e-6);
    CHECK(hermitian_eig(sol.estimate).values.minCoeff() >= -1e-10);
    for (std::size_t k = 1; k < sol.objective_trace.size(); ++k) {
      REQUIRE(sol.objective_trace[k] <= sol.objective_trace[k - 1] + 1e-12);
    }
  }
}

TEST_CASE("extraction from an exact lift") {
  SeededRng rng(5);
  for (int n = 2; n <= 8; ++n) {
    const auto e = UnitaryEnsemble::haar(n, 4, rng);
    const CVector x = random_state(n, rng);
    RecoveryConfig cfg;
    cfg.refinement = false;
    const auto r = extract_and_refine(e, measure_state(e, x), HermitianMatrix::outer(x), cfg, x);
    REQUIRE(r.dist_mod_phase.has_value());
    CHECK(*r.dist_mod_phase < 1e-12 * std::max(1.0, x.norm()));
  }
  const auto e = UnitaryEnsemble::haar(3, 4, rng);
  const auto r = extract_and_refine(e, measure_state(e, CVector::Zero(3)), HermitianMatrix::zero(3), {});
  CHECK(r.degenerate);
  CHECK(r.estimate.norm() == 0.0);
}

TEST_CASE("end-to-end recovery at n = 8") {
  SeededRng rng(6);
  for (int t = 0; t < 5; ++t) {
    const auto e = UnitaryEnsemble::haar(8, 4, rng);
    const CVector x = random_unit_vector(8, rng);
    const auto b = measure_state(e, x);
    const auto r = recover(e, b, {}, x);
    REQUIRE(r.dist_mod_phase.has_value());
    CHECK(*r.dist_mod_phase < 1e-8);
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
      REQUIRE(r.objective_trace[k] <= r.objective_trace[k - 1] + 1e-12);
    }
    // Residual recomputed independently from the trace definition.
    double res = 0.0;
    const CMatrix lift = r.estimate * r.estimate.adjoint();
    for (int i = 0; i < e.measurement_count(); ++i) {
      res += std::pow(oracle::trace_measurement(e.row(i), lift) - b.values(i), 2);
    }
    CHECK(std::abs(std::sqrt(res) - r.residual) < 1e-12);
  }
}

TEST_CASE("recovery degrades gracefully under small noise") {
  SeededRng rng(7);
  for (int t = 0; t < 5; ++t) {
    const auto e = UnitaryEnsemble::haar(6, 4, rng);
    const CVector x = random_unit_vector(6, rng);
    auto b = measure_state(e, x);
    RVector noise(b.values.size());
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();
    b.values += 1e-6 * noise / noise.norm();
    const auto r = recover(e, b, {}, x);
    CHECK(std::isfinite(r.residual));
    CHECK(r.residual <= 1e-5);
  }
}

TEST_CASE("small residual implies recovery on certified-injective ensembles") {
  SeededRng rng(8);
  CertifyConfig cc;
  cc.rank2.starts = cc.direct.starts = 8;
  for (const int n : {3, 4}) {
    const auto e = UnitaryEnsemble::haar(n, 4, rng);
    REQUIRE(certify(e, cc, rng).verdict == Verdict::no_collision_found);
    const CVector x = random_unit_vector(n, rng);
    const auto r = recover(e, measure_state(e, x), {}, x);
    if (r.residual < 1e-10) CHECK(*r.dist_mod_phase < 1e-6 * x.norm());
  }
}
