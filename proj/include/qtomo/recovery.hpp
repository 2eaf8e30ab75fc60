#pragma once

#include <optional>
#include <vector>

#include "qtomo/linalg.hpp"
#include "qtomo/measurement.hpp"

namespace qtomo {

struct RecoveryConfig {
  int max_iterations = 5000;
  /// Backtracking: step shrinks by this factor until sufficient decrease.
  double step_shrink = 0.5;
  double sufficient_decrease = 1e-4;
  /// Stop when the (projected) gradient norm falls below this.
  double convergence_tol = 1e-10;
  bool refinement = true;
  int refinement_iterations = 5000;
};

/// Top eigenvector of sum_i b_i z_i z_i^*.
CVector spectral_init(const UnitaryEnsemble& e, const MeasurementVector& b);

struct LiftedSolution {
  HermitianMatrix estimate = HermitianMatrix::zero(1);
  std::vector<double> objective_trace;  // 0.5 ||A(X) - b||^2 after each accepted step
  int iterations = 0;
  bool converged = false;
  double lipschitz = 0.0;  // squared spectral norm of the realified operator
};

/// Projected gradient on 0.5 ||A(X) - b||^2 over the PSD cone, starting from
/// the scaled spectral initializer, with monotone Nesterov extrapolation.
/// Steps backtrack from 1/L.
LiftedSolution phaselift_solve(const UnitaryEnsemble& e, const MeasurementVector& b, const RecoveryConfig& config);

struct RecoveryResult {
  CVector estimate;
  std::optional<double> dist_mod_phase;  // present when the truth is known
  double residual = 0.0;                 // ||A(x x^*) - b||_2
  int iterations = 0;                    // lifted + refinement
  std::vector<double> objective_trace;   // refinement objective per accepted step
  bool converged = false;
  bool degenerate = false;
};

/// f(x) = 0.5 sum_i (|<z_i, x>|^2 - b_i)^2.
double intensity_loss(const UnitaryEnsemble& e, const MeasurementVector& b, const CVector& x);
/// Gradient g of intensity_loss with df = Re(g^* dx), i.e. 2 sum_i r_i z_i <z_i, x>.
CVector intensity_gradient(const UnitaryEnsemble& e, const MeasurementVector& b, const CVector& x);

/// sqrt(lambda_1) u_1 from the top eigenpair, then optional gradient descent on intensity_loss.
RecoveryResult extract_and_refine(const UnitaryEnsemble& e, const MeasurementVector& b, const HermitianMatrix& lifted,
                                  const RecoveryConfig& config, const std::optional<CVector>& truth = std::nullopt);

/// phaselift_solve followed by extract_and_refine.
RecoveryResult recover(const UnitaryEnsemble& e, const MeasurementVector& b, const RecoveryConfig& config,
                       const std::optional<CVector>& truth = std::nullopt);

/// min over |c| = 1 of ||x - c y||_2 = sqrt(||x||^2 + ||y||^2 - 2 |<x, y>|).
double dist_mod_phase(const CVector& x, const CVector& y);

}  // namespace qtomo
