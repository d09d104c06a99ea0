#pragma once

#include <Eigen/Core>
#include <vector>

#include "sdcbf/poly.hpp"
#include "sdcbf/reach.hpp"

namespace sdcbf {

// Knobs for the Taylor-model + branch-and-bound margin computation.
struct MarginOptions {
  int order = 2;              // Taylor order for the model of delta-xi
  double tol = 1e-6;          // branch-and-bound gap target
  long node_budget = 20000;   // branch-and-bound node limit
  double wall_budget_s = 0.0; // wall-clock limit in seconds, 0 = unlimited
};

struct MarginRequest {
  MultiPoly xi;
  Eigen::VectorXd x_anchor;  // sampled state or its estimate
  Eigen::VectorXd u_center;  // geometric center of the input box
  double dt = 0.0;
  double eps_x = 0.0;
  int order = 2;
};

struct PopStats {
  long nodes = 0;
  double wall_s = 0.0;
  bool budget_hit = false;
};

struct MarginResult {
  double phi;           // remainder_lo + poly_lo
  double remainder_lo;  // lower end of the Taylor remainder interval
  double poly_lo;       // lower bound of the Taylor polynomial over the centered box
  IntervalVector zk_hull;
  long nodes;
  double wall_s;
  TaylorModel model;  // kept around for containment audits
};

// xi(x,u) - xi(anchor,u) with u kept symbolic.
MultiPoly delta_xi(const MultiPoly& xi, const Eigen::VectorXd& x_anchor);

// Joint box hull(tube) x U.
IntervalVector assemble_zk(const ReachResult& reach, const IntervalVector& U_box);

// Sound lower bound of p over the box via interval branch-and-bound with
// midpoint incumbents and monotonicity-based face reduction. Affine p gets a
// closed-form directed-rounding bound. Budget exhaustion loosens the bound
// but never its soundness.
double lower_bound_poly(const MultiPoly& p, const IntervalVector& box, double tol = 1e-6,
                        long node_budget = 20000, PopStats* stats = nullptr,
                        double wall_budget_s = 0.0);

MarginResult compute_margin(const MarginRequest& req, const ReachResult& reach,
                            const IntervalVector& U_box, const MarginOptions& opts = {});

// True iff every s_k is nonnegative over the box enclosure of the radius-eps_x
// ball around x0_hat.
bool check_initial_condition(const std::vector<MultiPoly>& s_chain,
                             const Eigen::VectorXd& x0_hat, double eps_x,
                             const MarginOptions& opts = {});

}  // namespace sdcbf
