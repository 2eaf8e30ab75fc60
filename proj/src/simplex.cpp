#include "simplex.hpp"

#include <cmath>
#include <vector>

namespace qtomo::detail {
namespace {

constexpr double kPivotEps = 1e-12;

class Tableau {
 public:
  Tableau(const RMatrix& a, const RVector& b)
      : rows_(a.rows()), vars_(a.cols()), t_(RMatrix::Zero(a.rows() + 1, a.cols() + a.rows() + 1)) {
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const double sign = b(r) < 0.0 ? -1.0 : 1.0;
      t_.row(r).head(vars_) = sign * a.row(r);
      t_(r, vars_ + r) = 1.0;
      t_(r, rhs()) = sign * b(r);
      basis_.push_back(vars_ + r);
    }
  }

  // Loads cost into the objective row, reduced against the current basis.
  void set_objective(const RVector& full_cost) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(full_cost.size()) = full_cost.transpose();
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const double cb = t_(rows_, basis_[r]);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(r);
    }
  }

  // Returns false if unbounded.
  bool optimize(Eigen::Index allowed_columns) {
    for (int guard = 0; guard < 10000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < allowed_columns; ++c) {
        if (t_(rows_, c) < -kPivotEps) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index r = 0; r < rows_; ++r) {
        if (t_(r, enter) > kPivotEps) {
          const double ratio = t_(r, rhs()) / t_(r, enter);
          if (leave < 0 || ratio < best - 1e-15 ||
              (std::abs(ratio - best) <= 1e-15 && basis_[r] < basis_[leave])) {
            leave = r;
            best = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return false;
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index k = 0; k <= rows_; ++k) {
      if (k != r && t_(k, c) != 0.0) t_.row(k) -= t_(k, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  // Pivots zero-level artificial variables out of the basis where possible.
  void expel_artificials() {
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (basis_[r] < vars_) continue;
      for (Eigen::Index c = 0; c < vars_; ++c) {
        if (std::abs(t_(r, c)) > 1e-9) {
          pivot(r, c);
          break;
        }
      }
    }
  }

  double objective_value() const { return -t_(rows_, rhs()); }

  RVector solution() const {
    RVector p = RVector::Zero(vars_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (basis_[r] < vars_) p(basis_[r]) = t_(r, rhs());
    }
    return p;
  }

  Eigen::Index vars() const { return vars_; }
  Eigen::Index rows() const { return rows_; }

 private:
  Eigen::Index rhs() const { return vars_ + rows_; }

  Eigen::Index rows_;
  Eigen::Index vars_;
  RMatrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

std::optional<RVector> solve_standard_lp(const RMatrix& a, const RVector& b, const RVector& cost) {
  Tableau tab(a, b);
  RVector phase1 = RVector::Zero(tab.vars() + tab.rows());
  phase1.tail(tab.rows()).setOnes();
  tab.set_objective(phase1);
  if (!tab.optimize(tab.vars() + tab.rows())) return std::nullopt;
  if (tab.objective_value() > 1e-9) return std::nullopt;
  tab.expel_artificials();

  RVector phase2 = RVector::Zero(tab.vars() + tab.rows());
  phase2.head(tab.vars()) = cost;
  tab.set_objective(phase2);
  if (!tab.optimize(tab.vars())) return std::nullopt;
  return tab.solution();
}

}  // namespace qtomo::detail
