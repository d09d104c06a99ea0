#pragma once

#include <Eigen/Core>

#include "sdcbf/interval.hpp"

namespace sdcbf {

// Set {center + G * beta | beta in [-1,1]^g}, generators as matrix columns.
struct Zonotope {
  Eigen::VectorXd center;
  Eigen::MatrixXd generators;

  static Zonotope point(const Eigen::VectorXd& c);
  static Zonotope from_box(const IntervalVector& box);

  int dim() const { return static_cast<int>(center.size()); }
  int num_generators() const { return static_cast<int>(generators.cols()); }
};

Zonotope linear_map(const Eigen::MatrixXd& M, const Zonotope& Z);
Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
// Outward-rounded per-coordinate hull: center +- sum of |generator| entries.
IntervalVector interval_hull(const Zonotope& Z);
// Shift the center by a constant offset.
Zonotope translate(const Zonotope& Z, const Eigen::VectorXd& offset);
// Drop all-zero generator columns.
Zonotope compact(const Zonotope& Z);
// Enclose with at most max_generators columns; falls back to the interval
// hull box when over budget (sound, coarse).
Zonotope reduce_generators(const Zonotope& Z, int max_generators);
// Enclosure of the convex hull of two zonotopes with paired generators
// (same count, column i of a corresponding to column i of b).
Zonotope convex_hull_paired(const Zonotope& a, const Zonotope& b);

}  // namespace sdcbf
