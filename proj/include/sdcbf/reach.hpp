#pragma once

#include <Eigen/Core>
#include <vector>

#include "sdcbf/interval.hpp"
#include "sdcbf/poly.hpp"
#include "sdcbf/zonotope.hpp"

namespace sdcbf {

// Differential inclusion dx/dt in A(x - x_star) + B(u - u_star) + c + L,
// valid for all (x, u) in the linearization domain.
struct LinearizedSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd c;
  IntervalVector L;
  Eigen::VectorXd x_star;
  Eigen::VectorXd u_star;
};

struct ReachResult {
  Zonotope tube;
  Zonotope endpoint;
  IntervalVector hull;
  // Linearization domain the remainder was certified over (reach_step only).
  IntervalVector domain;
  int fixpoint_rounds = 0;
};

struct ReachOptions {
  int expm_order = 6;
  int max_fixpoint_rounds = 5;
  int max_generators = 64;
};

// First-order Taylor expansion of F(x,u) = f(x) + g(x) u at (x_star, u_star)
// with an interval Hessian remainder over state_box x input_box.
// f has length n; g is n rows by m columns of state polynomials.
LinearizedSystem linearize(const std::vector<MultiPoly>& f,
                           const std::vector<std::vector<MultiPoly>>& g,
                           const Eigen::VectorXd& x_star, const Eigen::VectorXd& u_star,
                           const IntervalVector& state_box, const IntervalVector& input_box);

// Guaranteed enclosure of all solutions of the inclusion from X0 under
// constant u in U_box over [0, dt].
ReachResult reach_tube(const LinearizedSystem& sys, const Zonotope& X0,
                       const IntervalVector& U_box, double dt, const ReachOptions& opts = {});

// One sampling interval of the nonlinear system: choose a linearization
// domain a priori, compute the tube, verify the domain a posteriori, and
// inflate + retry on failure.
ReachResult reach_step(const std::vector<MultiPoly>& f,
                       const std::vector<std::vector<MultiPoly>>& g, const Zonotope& X0,
                       const IntervalVector& U_box, double dt, const ReachOptions& opts = {});

}  // namespace sdcbf
