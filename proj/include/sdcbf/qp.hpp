#pragma once

#include <Eigen/Core>
#include <vector>

#include "sdcbf/controller.hpp"
#include "sdcbf/interval.hpp"

namespace sdcbf {

struct QPResult {
  Eigen::VectorXd u_star;
  // Indices of the certifying active set: 0..nc-1 are caller constraints in
  // order, then box rows interleaved as lo_0, hi_0, lo_1, hi_1, ...
  std::vector<int> active_set;
  double kkt_residual = 0.0;
  bool feasible = false;
};

// minimize ||u - u_nom||^2 subject to row_i * u + rhs_i >= 0 and u in U_eff.
// Exhaustive active-set search: every candidate multiplier support of size
// <= dim(u) is solved exactly and checked against the KKT conditions, which
// is affordable and bit-deterministic at these sizes. An infeasible problem
// returns the flagged least-violation point inside the box.
QPResult solve_safety_qp(const Eigen::VectorXd& u_nom,
                         const std::vector<LinearConstraint>& constraints,
                         const IntervalVector& U_eff);

}  // namespace sdcbf
