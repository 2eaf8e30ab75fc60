#include "qtomo/varieties.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtomo/errors.hpp"
#include "simplex.hpp"

namespace qtomo {
namespace {

constexpr int kPhaseResamples = 100;
constexpr int kMixingHalvings = 12;

// Nonnegative p with sum 1, sum p_j cos(theta_j) = 0, sum p_j sin(theta_j) = 0.
// Mixes random positive weights q with an LP solution r chosen to cancel q's
// centroid, so that every p_j >= alpha q_j > 0 whenever the mixture succeeds.
std::optional<RVector> balancing_weights(const RVector& cx, const RVector& cy, SeededRng& rng) {
  const Eigen::Index n = cx.size();
  RMatrix a(3, n);
  a.row(0).setOnes();
  a.row(1) = cx.transpose();
  a.row(2) = cy.transpose();

  RVector q(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    q(j) = -std::log(u);
  }
  q /= q.sum();
  const Eigen::Vector2d centroid(cx.dot(q), cy.dot(q));

  auto random_cost = [&] {
    RVector c(n);
    for (Eigen::Index j = 0; j < n; ++j) c(j) = rng.normal();
    return c;
  };

  std::optional<RVector> p;
  double alpha = 0.5;
  for (int k = 0; k < kMixingHalvings && !p; ++k, alpha *= 0.5) {
    const double beta = alpha / (1.0 - alpha);
    const Eigen::Vector3d target(1.0, -beta * centroid(0), -beta * centroid(1));
    if (auto r = detail::solve_standard_lp(a, target, random_cost())) p = alpha * q + (1.0 - alpha) * *r;
  }
  if (!p) {
    if (auto r = detail::solve_standard_lp(a, Eigen::Vector3d(1.0, 0.0, 0.0), random_cost())) p = *r;
  }
  if (!p) return std::nullopt;

  // Project back onto the affine constraints to remove pivoting round-off.
  const Eigen::Vector3d b(1.0, 0.0, 0.0);
  const Eigen::Matrix3d gram = a * a.transpose();
  *p -= a.transpose() * gram.ldlt().solve(a * *p - b);
  if ((p->array() < -1e-12).any()) return std::nullopt;
  *p = p->cwiseMax(0.0);
  return p;
}

double max_abs(const RVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

std::string_view to_string(VarietyKind k) { return k == VarietyKind::X ? "X" : "Y"; }

VarietyKind variety_kind_from_string(std::string_view s) {
  if (s == "X" || s == "x") return VarietyKind::X;
  if (s == "Y" || s == "y") return VarietyKind::Y;
  throw PreconditionError("unknown variety kind '" + std::string(s) + "'");
}

RVector VarietyPoint::coordinates() const {
  RVector c(4 * n);
  c << v, w, x, y;
  return c;
}

VarietyPoint VarietyPoint::from_coordinates(const RVector& coords, VarietyKind kind) {
  if (coords.size() % 4 != 0 || coords.size() == 0) throw DimensionMismatch("variety coordinates must be 4n");
  const int n = static_cast<int>(coords.size() / 4);
  return {n, coords.segment(0, n), coords.segment(n, n), coords.segment(2 * n, n), coords.segment(3 * n, n),
          kind};
}

double VarietyResiduals::max() const { return std::max({f, g, h1, h2, w12}); }

RVector defining_equations(const RVector& coords, int n, VarietyKind kind) {
  if (coords.size() != 4 * n) throw DimensionMismatch("defining_equations: expected 4n coordinates");
  const auto v = coords.segment(0, n);
  const auto w = coords.segment(n, n);
  const auto x = coords.segment(2 * n, n);
  const auto y = coords.segment(3 * n, n);
  const RVector mod = v.cwiseAbs2() + w.cwiseAbs2();
  RVector out(n + (kind == VarietyKind::Y ? 5 : 3));
  out.head(n) = x.cwiseAbs2() + y.cwiseAbs2() - RVector::Ones(n);
  out(n) = mod.sum() - 1.0;
  out(n + 1) = mod.dot(x);
  out(n + 2) = mod.dot(y);
  if (kind == VarietyKind::Y) {
    out(n + 3) = w(0);
    out(n + 4) = w(1);
  }
  return out;
}

VarietyResiduals residuals(const VarietyPoint& p) {
  const RVector eq = defining_equations(p.coordinates(), p.n, VarietyKind::X);
  VarietyResiduals r;
  r.f = max_abs(eq.head(p.n));
  r.g = std::abs(eq(p.n));
  r.h1 = std::abs(eq(p.n + 1));
  r.h2 = std::abs(eq(p.n + 2));
  if (p.kind == VarietyKind::Y) r.w12 = std::max(std::abs(p.w(0)), std::abs(p.w(1)));
  return r;
}

VarietyPoint sample_variety_point(VarietyKind kind, int n, SeededRng& rng) {
  if (n < 2) throw PreconditionError("sample_variety_point: n must be >= 2");
  for (int attempt = 0; attempt < kPhaseResamples; ++attempt) {
    RVector cx(n);
    RVector cy(n);
    for (int j = 0; j < n; ++j) {
      const double t = rng.angle();
      cx(j) = std::cos(t);
      cy(j) = std::sin(t);
    }
    if (n == 2) {
      // Two unit vectors balance only when antipodal.
      cx(1) = -cx(0);
      cy(1) = -cy(0);
    }
    const auto p = balancing_weights(cx, cy, rng);
    if (!p) continue;
    VarietyPoint pt{n, RVector(n), RVector(n), cx, cy, kind};
    for (int j = 0; j < n; ++j) {
      const double r = std::sqrt((*p)(j));
      const double phi = (kind == VarietyKind::Y && j < 2) ? 0.0 : rng.angle();
      pt.v(j) = r * std::cos(phi);
      pt.w(j) = (kind == VarietyKind::Y && j < 2) ? 0.0 : r * std::sin(phi);
    }
    return pt;
  }
  throw SamplerError("sample_variety_point: no balancing weights after " + std::to_string(kPhaseResamples) +
                     " phase draws");
}

RMatrix variety_jacobian(const VarietyPoint& p) {
  const int n = p.n;
  const int rows = n + (p.kind == VarietyKind::Y ? 5 : 3);
  RMatrix j = RMatrix::Zero(rows, 4 * n);
  const int iv = 0, iw = n, ix = 2 * n, iy = 3 * n;
  for (int i = 0; i < n; ++i) {
    j(i, ix + i) = 2.0 * p.x(i);
    j(i, iy + i) = 2.0 * p.y(i);
  }
  for (int k = 0; k < n; ++k) {
    const double mod = p.v(k) * p.v(k) + p.w(k) * p.w(k);
    j(n, iv + k) = 2.0 * p.v(k);
    j(n, iw + k) = 2.0 * p.w(k);
    j(n + 1, iv + k) = 2.0 * p.v(k) * p.x(k);
    j(n + 1, iw + k) = 2.0 * p.w(k) * p.x(k);
    j(n + 1, ix + k) = mod;
    j(n + 2, iv + k) = 2.0 * p.v(k) * p.y(k);
    j(n + 2, iw + k) = 2.0 * p.w(k) * p.y(k);
    j(n + 2, iy + k) = mod;
  }
  if (p.kind == VarietyKind::Y) {
    j(n + 3, iw + 0) = 1.0;
    j(n + 4, iw + 1) = 1.0;
  }
  return j;
}

JacobianReport jacobian_rank_report(const VarietyPoint& p, double rank_tol) {
  JacobianReport report;
  report.residuals = residuals(p);
  if (!(report.residuals.max() < kVarietyResidualTol)) {
    throw PreconditionError("jacobian_rank_report: point is not on the variety (residual " +
                            std::to_string(report.residuals.max()) + ")");
  }
  if (p.kind == VarietyKind::Y && report.residuals.w12 != 0.0) {
    throw PreconditionError("jacobian_rank_report: Y point must have w_1 = w_2 = 0");
  }
  const RankReport rank = rank_with_tol(variety_jacobian(p), rank_tol);
  report.point = p;
  report.singular_values = rank.singular_values;
  report.rank = rank.rank;
  report.corank_dimension = 4 * p.n - rank.rank;
  report.spectral_gap = rank.rank > 0 ? rank.singular_values(rank.rank - 1) / rank.singular_values(0) : 0.0;
  return report;
}

std::vector<JacobianReport> variety_batch(VarietyKind kind, int n, int count, const SeededRng& rng,
                                          Execution exec) {
  std::vector<JacobianReport> out(std::max(count, 0));
  for_each_index(count, exec, [&](std::ptrdiff_t k) {
    SeededRng local = rng.split(static_cast<std::uint64_t>(k));
    out[k] = jacobian_rank_report(sample_variety_point(kind, n, local));
  });
  return out;
}

FramePair s_map(const VarietyPoint& p) {
  FramePair f;
  f.u1 = CVector(p.n);
  f.u2 = CVector(p.n);
  for (int j = 0; j < p.n; ++j) {
    f.u1(j) = Complex(p.v(j), p.w(j));
    f.u2(j) = f.u1(j) * Complex(p.x(j), p.y(j));
  }
  return f;
}

double WMembership::max_residual() const {
  return std::max({norm_residual, orthogonality_residual, modulus_residual});
}

WMembership w_membership(const FramePair& f, double tol) {
  if (f.u1.size() != f.u2.size()) throw DimensionMismatch("w_membership: vectors differ in length");
  WMembership m;
  m.norm_residual = std::max(std::abs(f.u1.norm() - 1.0), std::abs(f.u2.norm() - 1.0));
  m.orthogonality_residual = std::abs(f.u1.dot(f.u2));
  m.modulus_residual = max_abs(f.u1.cwiseAbs() - f.u2.cwiseAbs());
  m.member = m.max_residual() <= tol;
  return m;
}

namespace {

void check_index(const FramePair& f, int j) {
  if (j < 0 || j >= f.u1.size() || f.u1.size() != f.u2.size()) {
    throw PreconditionError("frame index out of range");
  }
}

}  // namespace

bool in_w_ij(const FramePair& f, int i, int j, double tol) {
  check_index(f, i);
  check_index(f, j);
  return w_membership(f, tol).member && std::abs(f.u1(i)) > tol && std::abs(f.u2(j)) > tol &&
         std::abs(f.u1(i).imag()) <= tol && std::abs(f.u2(j).imag()) <= tol;
}

bool in_w_prime_ij(const FramePair& f, int i, int j, double tol) {
  check_index(f, i);
  check_index(f, j);
  return w_membership(f, tol).member && std::abs(f.u1(i)) > tol && std::abs(f.u1(j)) > tol &&
         std::abs(f.u1(i).imag()) <= tol && std::abs(f.u1(j).imag()) <= tol;
}

FramePair fix_chart_phases(const FramePair& f, int i, int j) {
  check_index(f, i);
  check_index(f, j);
  if (f.u1(i) == Complex(0.0) || f.u2(j) == Complex(0.0)) {
    throw PreconditionError("fix_chart_phases: pivot component is zero");
  }
  FramePair out{f.u1 * (std::conj(f.u1(i)) / std::abs(f.u1(i))), f.u2 * (std::conj(f.u2(j)) / std::abs(f.u2(j)))};
  out.u1(i) = Complex(out.u1(i).real(), 0.0);
  out.u2(j) = Complex(out.u2(j).real(), 0.0);
  return out;
}

FramePair swap_map_phi(int j, const FramePair& f) {
  check_index(f, j);
  FramePair out = f;
  out.u1(j) = f.u2(j);
  out.u2(j) = std::conj(f.u1(j));
  return out;
}

FramePair swap_map_phi_inverse(int j, const FramePair& f) {
  check_index(f, j);
  FramePair out = f;
  out.u1(j) = std::conj(f.u2(j));
  out.u2(j) = f.u1(j);
  return out;
}

DimensionLedger dimension_ledger(int n) {
  if (n < 2) throw PreconditionError("dimension_ledger: n must be >= 2");
  const std::int64_t nn = n;
  DimensionLedger d;
  d.n = n;
  d.dim_w = 3 * nn - 3;
  d.dim_w_ij = 3 * nn - 5;
  d.dim_p_alpha_prime = 4 * d.dim_w - 2;
  d.dim_p_alpha = 4 * d.dim_w + 4 * (nn - 2) * (nn - 2);
  d.dim_g_prime = 2 + (nn - 2) * (nn - 2);
  d.dim_p_alpha_mod_g_prime = d.dim_p_alpha - d.dim_g_prime;
  d.dim_m_mod_g = 3 * nn * nn;
  d.identity_holds = d.dim_p_alpha_mod_g_prime == 3 * nn * nn - 2;
  d.strict_inequality_holds = d.dim_p_alpha_mod_g_prime < d.dim_m_mod_g;
  return d;
}

}  // namespace qtomo
