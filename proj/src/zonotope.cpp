#include "sdcbf/zonotope.hpp"

#include "sdcbf/errors.hpp"

namespace sdcbf {

Zonotope Zonotope::point(const Eigen::VectorXd& c) {
  return Zonotope{c, Eigen::MatrixXd(c.size(), 0)};
}

Zonotope Zonotope::from_box(const IntervalVector& box) {
  int n = box.size();
  Eigen::VectorXd c(n);
  std::vector<std::pair<int, double>> radii;
  for (int i = 0; i < n; ++i) {
    c[i] = box[i].midpoint();
    double r = box[i].radius();
    if (r > 0.0) radii.emplace_back(i, r);
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(radii.size()));
  for (size_t k = 0; k < radii.size(); ++k) G(radii[k].first, static_cast<Eigen::Index>(k)) = radii[k].second;
  return Zonotope{std::move(c), std::move(G)};
}

Zonotope linear_map(const Eigen::MatrixXd& M, const Zonotope& Z) {
  if (M.cols() != Z.center.size()) throw DimensionError("zonotope: linear map dimension mismatch");
  return Zonotope{M * Z.center, M * Z.generators};
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b) {
  if (a.dim() != b.dim()) throw DimensionError("zonotope: Minkowski sum dimension mismatch");
  Eigen::MatrixXd G(a.dim(), a.num_generators() + b.num_generators());
  G << a.generators, b.generators;
  return Zonotope{a.center + b.center, std::move(G)};
}

IntervalVector interval_hull(const Zonotope& Z) {
  IntervalVector hull(Z.dim());
  for (int i = 0; i < Z.dim(); ++i) {
    double r = 0.0;
    for (int j = 0; j < Z.num_generators(); ++j) r = rnd::add_dir(r, std::abs(Z.generators(i, j)), true);
    hull[i] = Interval(rnd::sub_dir(Z.center[i], r, false), rnd::add_dir(Z.center[i], r, true));
  }
  return hull;
}

Zonotope translate(const Zonotope& Z, const Eigen::VectorXd& offset) {
  if (offset.size() != Z.center.size()) throw DimensionError("zonotope: translate dimension mismatch");
  return Zonotope{Z.center + offset, Z.generators};
}

Zonotope compact(const Zonotope& Z) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < Z.generators.cols(); ++j)
    if (Z.generators.col(j).cwiseAbs().maxCoeff() > 0.0) keep.push_back(j);
  Eigen::MatrixXd G(Z.dim(), static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) G.col(static_cast<Eigen::Index>(k)) = Z.generators.col(keep[k]);
  return Zonotope{Z.center, std::move(G)};
}

Zonotope reduce_generators(const Zonotope& Z, int max_generators) {
  Zonotope c = compact(Z);
  if (c.num_generators() <= max_generators) return c;
  return Zonotope::from_box(interval_hull(c));
}

Zonotope convex_hull_paired(const Zonotope& a, const Zonotope& b) {
  if (a.dim() != b.dim() || a.num_generators() != b.num_generators())
    throw DimensionError("zonotope: paired hull needs equal shape");
  int n = a.dim(), g = a.num_generators();
  Eigen::MatrixXd G(n, 2 * g + 1);
  G.col(0) = 0.5 * (a.center - b.center);
  for (int j = 0; j < g; ++j) {
    G.col(1 + j) = 0.5 * (a.generators.col(j) + b.generators.col(j));
    G.col(1 + g + j) = 0.5 * (a.generators.col(j) - b.generators.col(j));
  }
  return compact(Zonotope{0.5 * (a.center + b.center), std::move(G)});
}

}  // namespace sdcbf
