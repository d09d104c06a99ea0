#pragma once

#include <Eigen/Core>
#include <vector>

#include "sdcbf/interval.hpp"
#include "sdcbf/poly.hpp"

namespace sdcbf {

struct ControlAffineSystem {
  std::vector<MultiPoly> f;               // n drift components, state-only
  std::vector<std::vector<MultiPoly>> g;  // n x m input gain, state-only
  IntervalVector U_box;                   // admissible input box, m coordinates
  double eps_u = 0.0;                     // actuation uncertainty radius
};

// Barrier description. gamma drives the relative-degree-1 condition; a_vec
// and lambdas describe the degree-r cascade (a_vec holds the coefficients of
// the monic stability polynomial, lambdas its negated roots).
struct CBFSpec {
  MultiPoly h;
  double gamma = 0.0;
  Eigen::VectorXd a_vec;
  Eigen::VectorXd lambdas;
};

// Smallest r such that the input appears in the r-th time derivative of h,
// found symbolically and cross-checked at the probe points.
int relative_degree(const MultiPoly& h, const ControlAffineSystem& sys,
                    const std::vector<Eigen::VectorXd>& x_probe);

// The sampled condition's left-hand side as a joint polynomial, affine in u:
// r = 1:  L_f h + L_g h u + gamma h
// r >= 2: L_f^r h + L_g L_f^{r-1} h u + sum_i a_i L_f^{r-i} h
MultiPoly build_xi(const CBFSpec& spec, const ControlAffineSystem& sys, int r);

// s_0 = h, s_k = L_f s_{k-1} + lambda_k s_{k-1} for k = 1..r-1.
std::vector<MultiPoly> build_s_chain(const CBFSpec& spec, const ControlAffineSystem& sys,
                                     int r);

// Coefficients (a_1..a_r) of prod_i (x + lambda_i) = x^r + a_1 x^{r-1} + ... + a_r.
Eigen::VectorXd a_from_lambdas(const Eigen::VectorXd& lambdas);

// Negated roots of x^r + a_1 x^{r-1} + ... + a_r, validated all real and
// negative and re-expanded to reproduce a_vec; sorted ascending.
Eigen::VectorXd lambdas_from_a(const Eigen::VectorXd& a_vec);

// Pontryagin difference of the box and the 2-norm ball of radius eps_u,
// rounded inward. Exact for an axis-aligned box.
IntervalVector shrink_input_box(const IntervalVector& U_box, double eps_u);

// One linear inequality row * u + rhs >= 0 on the input.
struct LinearConstraint {
  Eigen::VectorXd row;
  double rhs = 0.0;
};

// Freeze the state of xi at the anchor: row carries the input coefficients,
// rhs the drift value plus the margin.
LinearConstraint make_constraint(const MultiPoly& xi, const Eigen::VectorXd& x_anchor,
                                 double phi);

}  // namespace sdcbf
