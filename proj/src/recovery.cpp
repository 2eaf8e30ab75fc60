#include "qtomo/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "qtomo/errors.hpp"

namespace qtomo {
namespace {

void check_shapes(const UnitaryEnsemble& e, const MeasurementVector& b) {
  if (b.values.size() != e.measurement_count()) {
    throw DimensionMismatch("measurement vector length differs from ensemble");
  }
}

// A^*(r) = sum_i r_i z_i z_i^*.
CMatrix adjoint_apply(const UnitaryEnsemble& e, const RVector& r) {
  const int n = e.n();
  CMatrix out = CMatrix::Zero(n, n);
  for (int k = 0; k < e.m(); ++k) {
    const CMatrix& u = e.unitary(k);
    // z_i = u.row(i)^T, so sum_i r_i z_i z_i^* = u^T diag(r) conj(u).
    const RVector rk = r.segment(static_cast<Eigen::Index>(k) * n, n);
    out += u.transpose() * rk.cast<Complex>().asDiagonal() * u.conjugate();
  }
  return out;
}

HermitianMatrix project_psd(const CMatrix& m) {
  const auto eig = hermitian_eig(HermitianMatrix(m, 1e-8));
  const RVector clipped = eig.values.cwiseMax(0.0);
  return HermitianMatrix(eig.vectors * clipped.cast<Complex>().asDiagonal() * eig.vectors.adjoint(), 1e-8);
}

double lifted_objective(const UnitaryEnsemble& e, const MeasurementVector& b, const HermitianMatrix& x) {
  return 0.5 * (apply_ensemble(e, x).values - b.values).squaredNorm();
}

}  // namespace

CVector spectral_init(const UnitaryEnsemble& e, const MeasurementVector& b) {
  check_shapes(e, b);
  if ((b.values.array() < 0.0).any()) throw PreconditionError("spectral_init: negative measurement");
  if (!(b.values.maxCoeff() > 0.0)) throw PreconditionError("spectral_init: all measurements are zero");
  const auto eig = hermitian_eig(HermitianMatrix(adjoint_apply(e, b.values), 1e-9));
  return eig.vectors.col(0).normalized();
}

LiftedSolution phaselift_solve(const UnitaryEnsemble& e, const MeasurementVector& b, const RecoveryConfig& config) {
  check_shapes(e, b);
  if (config.max_iterations < 1 || !(config.convergence_tol > 0.0) || !(config.step_shrink > 0.0 && config.step_shrink < 1.0)) {
    throw PreconditionError("phaselift_solve: invalid configuration");
  }
  LiftedSolution sol;
  const RankReport op = rank_with_tol(realified_operator(e).matrix);
  sol.lipschitz = op.singular_values(0) * op.singular_values(0);
  const double step0 = 1.0 / sol.lipschitz;

  // Each block sums to ||x||^2, so the mean block sum estimates the trace.
  const double scale = std::max(b.values.sum() / e.m(), 0.0);
  // Noisy data may dip below zero; the initializer only needs the direction.
  MeasurementVector nonneg = b;
  nonneg.values = b.values.cwiseMax(0.0);
  const CVector v = spectral_init(e, nonneg);
  HermitianMatrix x = HermitianMatrix::outer(v) * scale;
  double f = lifted_objective(e, b, x);

  // Monotone accelerated projected gradient: the proximal step is taken from
  // an extrapolated point y, and the iterate only moves when the objective
  // does not increase.
  HermitianMatrix y = x;
  double t = 1.0;
  for (int it = 0; it < config.max_iterations; ++it) {
    const RVector ry = apply_ensemble(e, y).values - b.values;
    const double fy = 0.5 * ry.squaredNorm();
    const CMatrix grad = adjoint_apply(e, ry);
    double step = step0;
    bool accepted = false;
    HermitianMatrix z = y;
    double fz = fy;
    double move_sq = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      z = project_psd(y.matrix() - step * grad);
      const CMatrix d = z.matrix() - y.matrix();
      move_sq = d.squaredNorm();
      fz = lifted_objective(e, b, z);
      // Sufficient decrease relative to the linear model at y.
      if (fz <= fy + (grad.adjoint() * d).trace().real() + (0.5 - config.sufficient_decrease) / step * move_sq) {
        accepted = true;
        break;
      }
      step *= config.step_shrink;
    }
    if (!accepted) {
      sol.converged = true;
      break;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const bool improved = fz <= f;
    const HermitianMatrix x_prev = x;
    if (improved) {
      x = z;
      f = fz;
    }
    sol.objective_trace.push_back(f);
    sol.iterations = it + 1;
    if (std::sqrt(move_sq) / step < config.convergence_tol && improved) {
      sol.converged = true;
      break;
    }
    // y = x + (t/t_next)(z - x) + ((t - 1)/t_next)(x - x_prev); restart when z was rejected.
    if (improved) {
      y = HermitianMatrix(CMatrix(x.matrix() + (t / t_next) * (z.matrix() - x.matrix()) +
                                  ((t - 1.0) / t_next) * (x.matrix() - x_prev.matrix())),
                          1e-8);
      t = t_next;
    } else {
      y = x;
      t = 1.0;
    }
  }
  sol.estimate = std::move(x);
  return sol;
}

double intensity_loss(const UnitaryEnsemble& e, const MeasurementVector& b, const CVector& x) {
  check_shapes(e, b);
  return 0.5 * (measure_state(e, x).values - b.values).squaredNorm();
}

CVector intensity_gradient(const UnitaryEnsemble& e, const MeasurementVector& b, const CVector& x) {
  check_shapes(e, b);
  const int n = e.n();
  CVector g = CVector::Zero(n);
  for (int k = 0; k < e.m(); ++k) {
    const CMatrix& u = e.unitary(k);
    const CVector a = u.conjugate() * x;
    const RVector r = a.cwiseAbs2() - b.values.segment(static_cast<Eigen::Index>(k) * n, n);
    g += 2.0 * u.transpose() * r.cast<Complex>().cwiseProduct(a);
  }
  return g;
}

RecoveryResult extract_and_refine(const UnitaryEnsemble& e, const MeasurementVector& b, const HermitianMatrix& lifted,
                                  const RecoveryConfig& config, const std::optional<CVector>& truth) {
  check_shapes(e, b);
  if (lifted.size() != e.n()) throw DimensionMismatch("extract_and_refine: lifted estimate has wrong size");
  RecoveryResult result;
  const auto eig = hermitian_eig(lifted);
  if (!(eig.values(0) > 0.0)) {
    result.estimate = CVector::Zero(e.n());
    result.degenerate = true;
  } else {
    CVector x = std::sqrt(eig.values(0)) * eig.vectors.col(0);
    if (config.refinement) {
      double f = intensity_loss(e, b, x);
      CVector g = intensity_gradient(e, b, x);
      double step = 1.0 / std::max(1.0, x.squaredNorm() * e.m());
      result.converged = g.norm() < config.convergence_tol;
      for (int it = 0; it < config.refinement_iterations && !result.converged; ++it) {
        const double gsq = g.squaredNorm();
        bool accepted = false;
        CVector xn;
        double fn = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
          xn = x - step * g;
          fn = intensity_loss(e, b, xn);
          if (fn <= f - config.sufficient_decrease * step * gsq) {
            accepted = true;
            break;
          }
          step *= config.step_shrink;
        }
        if (!accepted) break;
        const CVector gn = intensity_gradient(e, b, xn);
        const CVector s = xn - x;
        const double sy = s.dot(gn - g).real();
        step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e6) : 2.0 * step;
        x = std::move(xn);
        f = fn;
        g = gn;
        result.objective_trace.push_back(f);
        result.iterations = it + 1;
        result.converged = g.norm() < config.convergence_tol;
      }
    } else {
      result.converged = true;
    }
    result.estimate = std::move(x);
  }
  result.residual = (measure_state(e, result.estimate).values - b.values).norm();
  if (truth) result.dist_mod_phase = dist_mod_phase(result.estimate, *truth);
  return result;
}

RecoveryResult recover(const UnitaryEnsemble& e, const MeasurementVector& b, const RecoveryConfig& config,
                       const std::optional<CVector>& truth) {
  const LiftedSolution lifted = phaselift_solve(e, b, config);
  RecoveryResult result = extract_and_refine(e, b, lifted.estimate, config, truth);
  result.iterations += lifted.iterations;
  return result;
}

double dist_mod_phase(const CVector& x, const CVector& y) {
  if (x.size() != y.size()) throw DimensionMismatch("dist_mod_phase: vectors differ in length");
  // Evaluated as ||x - c y|| with the optimal phase c rather than through the
  // closed form, which loses half the digits when x and y nearly coincide.
  const Complex overlap = y.dot(x);  // y^* x
  const double mag = std::abs(overlap);
  const Complex phase = mag > 0.0 ? overlap / mag : Complex(1.0, 0.0);
  return (x - phase * y).norm();
}

}  // namespace qtomo
