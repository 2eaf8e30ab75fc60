#pragma once

#include <optional>

#include "qtomo/linalg.hpp"

namespace qtomo::detail {

/// min cost^T p  s.t.  a p = b, p >= 0, by the two-phase tableau simplex
/// method with Bland's rule. Returns nullopt when infeasible or unbounded.
std::optional<RVector> solve_standard_lp(const RMatrix& a, const RVector& b, const RVector& cost);

}  // namespace qtomo::detail
