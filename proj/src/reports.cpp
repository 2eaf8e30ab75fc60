#include "qtomo/reports.hpp"

#include <cmath>

#include "qtomo/errors.hpp"

namespace qtomo {

Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json complex_vector_json(const CVector& v) {
  Json re = Json::array();
  Json im = Json::array();
  for (const auto& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

CVector complex_vector_from_json(const Json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != im.size()) throw PreconditionError("complex vector: re/im length mismatch");
  CVector v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t k = 0; k < re.size(); ++k) v(k) = Complex(re[k].get<double>(), im[k].get<double>());
  return v;
}

Json real_vector_json(const RVector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number_json(x));
  return out;
}

RVector real_vector_from_json(const Json& j) {
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(k) = j[k].get<double>();
  return v;
}

Json to_json(const MeasurementVector& mv) {
  const MeasurementVector c = clamp_dust(mv);
  return Json{{"n", c.n}, {"m", c.m}, {"values", real_vector_json(c.values)}};
}

MeasurementVector measurement_vector_from_json(const Json& j) {
  MeasurementVector mv;
  mv.n = j.at("n").get<int>();
  mv.m = j.at("m").get<int>();
  mv.values = real_vector_from_json(j.at("values"));
  if (mv.n < 1 || mv.m < 1 || mv.values.size() != static_cast<Eigen::Index>(mv.n) * mv.m) {
    throw PreconditionError("measurement vector: values must have n*m entries");
  }
  return mv;
}

Json to_json(const CollisionWitness& w) {
  return Json{{"x", complex_vector_json(w.x)},
              {"y", complex_vector_json(w.y)},
              {"residual", number_json(w.measurement_residual)},
              {"normalized_residual", number_json(w.normalized_residual)},
              {"lift_distance", number_json(w.lift_distance)},
              {"eigenvalues", real_vector_json(w.eigenvalues)}};
}

Json to_json(const CertificationReport& r, bool include_timing) {
  Json tol{{"rank", r.config.rank_tol},
           {"witness_residual", r.config.witness.residual},
           {"witness_eigenvalue", r.config.witness.eigenvalue},
           {"witness_normalized_residual", r.config.witness.normalized_residual},
           {"witness_min_lift_distance", r.config.witness.min_lift_distance},
           {"rank2_success_threshold", r.config.rank2.success_threshold},
           {"rank2_gradient", r.config.rank2.gradient_tol},
           {"direct_barrier", r.config.direct.barrier}};
  Json j{{"verdict", to_string(r.verdict)},
         {"semantics", r.verdict == Verdict::collision_found ? "proof: witness is checkable"
                                                             : "evidence: searches found no collision"},
         {"n", r.n},
         {"m", r.m},
         {"nullspace_dimension", r.nullspace_dimension},
         {"searches_skipped", r.searches_skipped},
         {"search_floor", number_json(r.search_floor)},
         {"direct_search_floor", number_json(r.direct_search_floor)},
         {"witness", r.witness ? to_json(*r.witness) : Json(nullptr)},
         {"witness_source", r.witness ? Json(r.witness_source) : Json(nullptr)},
         {"oracle_verdict", r.oracle_verdict ? Json(to_string(*r.oracle_verdict)) : Json(nullptr)},
         {"seed", r.seed},
         {"stream", r.stream},
         {"multistarts", {{"rank2", r.config.rank2.starts}, {"direct", r.config.direct.starts}}},
         {"tolerances", std::move(tol)}};
  if (include_timing) j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

Json to_json(const JacobianReport& r) {
  return Json{{"kind", to_string(r.point.kind)},
              {"n", r.point.n},
              {"residuals",
               {{"f", r.residuals.f}, {"g", r.residuals.g}, {"h1", r.residuals.h1}, {"h2", r.residuals.h2},
                {"w12", r.residuals.w12}}},
              {"rank", r.rank},
              {"corank_dimension", r.corank_dimension},
              {"spectral_gap", r.spectral_gap},
              {"singular_values", real_vector_json(r.singular_values)},
              {"point", real_vector_json(r.point.coordinates())}};
}

Json to_json(const DimensionLedger& d) {
  return Json{{"n", d.n},
              {"dim_W", d.dim_w},
              {"dim_W_ij", d.dim_w_ij},
              {"dim_P_alpha_prime", d.dim_p_alpha_prime},
              {"dim_P_alpha", d.dim_p_alpha},
              {"dim_G_prime", d.dim_g_prime},
              {"dim_P_alpha_mod_G_prime", d.dim_p_alpha_mod_g_prime},
              {"dim_M_mod_G", d.dim_m_mod_g},
              {"identity_holds", d.identity_holds},
              {"strict_inequality_holds", d.strict_inequality_holds}};
}

Json to_json(const RecoveryResult& r) {
  return Json{{"estimate", complex_vector_json(r.estimate)},
              {"residual", number_json(r.residual)},
              {"dist_mod_phase", r.dist_mod_phase ? number_json(*r.dist_mod_phase) : Json(nullptr)},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"degenerate", r.degenerate},
              {"final_objective", r.objective_trace.empty() ? Json(nullptr) : number_json(r.objective_trace.back())}};
}

}  // namespace qtomo
