#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "qtomo/execution.hpp"
#include "qtomo/linalg.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

/// X is cut out of R^{4n} = (v, w, x, y) by
///   f_i = x_i^2 + y_i^2 - 1,  g = sum(v_j^2 + w_j^2) - 1,
///   h_1 = sum (v_j^2 + w_j^2) x_j,  h_2 = sum (v_j^2 + w_j^2) y_j.
/// Y is the subvariety w_1 = w_2 = 0.
enum class VarietyKind { X, Y };

std::string_view to_string(VarietyKind k);
VarietyKind variety_kind_from_string(std::string_view s);

struct VarietyPoint {
  int n = 0;
  RVector v, w, x, y;
  VarietyKind kind = VarietyKind::X;

  /// Concatenation (v, w, x, y).
  RVector coordinates() const;
  static VarietyPoint from_coordinates(const RVector& coords, VarietyKind kind);
};

struct VarietyResiduals {
  double f = 0.0;  // max_i |f_i|
  double g = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double w12 = 0.0;  // max(|w_1|, |w_2|); only constrained for Y

  double max() const;
};

inline constexpr double kVarietyResidualTol = 1e-10;

/// Values of (f_1..f_n, g, h_1, h_2) and, for Y, (w_1, w_2).
RVector defining_equations(const RVector& coords, int n, VarietyKind kind);
VarietyResiduals residuals(const VarietyPoint& p);

/// Constructive sampler: unit-modulus x + iy with 0 in the convex hull,
/// weights p on the simplex balancing them (found by linear programming),
/// then v + iw = sqrt(p) e^{i phi} with phi_1 = phi_2 = 0 for Y.
VarietyPoint sample_variety_point(VarietyKind kind, int n, SeededRng& rng);

/// Analytic Jacobian of defining_equations: (n+3) x 4n for X, (n+5) x 4n for Y.
RMatrix variety_jacobian(const VarietyPoint& p);

struct JacobianReport {
  VarietyPoint point;
  VarietyResiduals residuals;
  RVector singular_values;
  int rank = 0;
  int corank_dimension = 0;  // 4n - rank
  double spectral_gap = 0.0;  // sigma_rank / sigma_1
};

JacobianReport jacobian_rank_report(const VarietyPoint& p, double rank_tol = kDefaultRankTol);

/// count independent samples; sample k draws from rng.split(k).
std::vector<JacobianReport> variety_batch(VarietyKind kind, int n, int count, const SeededRng& rng,
                                          Execution exec = Execution::parallel);

/// Pair of vectors (u1, u2) in C^n.
struct FramePair {
  CVector u1;
  CVector u2;
};

/// (v, w, x, y) -> (v + iw, (v + iw) o (x + iy)), o the Hadamard product.
FramePair s_map(const VarietyPoint& p);

struct WMembership {
  bool member = false;
  double norm_residual = 0.0;        // max(| ||u1|| - 1 |, | ||u2|| - 1 |)
  double orthogonality_residual = 0.0;  // |<u1, u2>|
  double modulus_residual = 0.0;     // max_i | |u1_i| - |u2_i| |
  double max_residual() const;
};

/// Orthonormal pair with equal componentwise moduli.
WMembership w_membership(const FramePair& f, double tol = 1e-9);

/// W_ij: member of W, u1_i != 0, u2_j != 0, Im u1_i = Im u2_j = 0.
bool in_w_ij(const FramePair& f, int i, int j, double tol = 1e-9);
/// W'_ij: member of W, u1_i != 0, u1_j != 0, Im u1_i = Im u1_j = 0.
bool in_w_prime_ij(const FramePair& f, int i, int j, double tol = 1e-9);

/// Multiplies u1 and u2 by global phases making u1_i and u2_j real positive.
FramePair fix_chart_phases(const FramePair& f, int i, int j);

/// Identity except at component j: (u1_j, u2_j) -> (u2_j, conj(u1_j)).
FramePair swap_map_phi(int j, const FramePair& f);
/// (u1_j, u2_j) -> (conj(u2_j), u1_j).
FramePair swap_map_phi_inverse(int j, const FramePair& f);

/// Every dimension bound used in the genericity argument.
struct DimensionLedger {
  int n = 0;
  std::int64_t dim_w = 0;                 // 3n - 3
  std::int64_t dim_w_ij = 0;              // 3n - 5
  std::int64_t dim_p_alpha_prime = 0;     // 4(3n - 3) - 2
  std::int64_t dim_p_alpha = 0;           // 4(3n - 3) + 4(n - 2)^2
  std::int64_t dim_g_prime = 0;           // 2 + (n - 2)^2
  std::int64_t dim_p_alpha_mod_g_prime = 0;  // dim_p_alpha - dim_g_prime
  std::int64_t dim_m_mod_g = 0;           // 3n^2
  bool identity_holds = false;            // dim_p_alpha_mod_g_prime == 3n^2 - 2
  bool strict_inequality_holds = false;   // dim_p_alpha_mod_g_prime < dim_m_mod_g
};

DimensionLedger dimension_ledger(int n);

}  // namespace qtomo
