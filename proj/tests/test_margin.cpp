#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sdcbf/margin.hpp"

using namespace sdcbf;

namespace {

struct Example1 {
  VarSpacePtr space = VarSpace::make(2, 1);
  MultiPoly h = parse_poly("-x2^2 - x1 + 1", space);
  std::vector<MultiPoly> f{parse_poly("-0.6*x1 - x2", space), parse_poly("x1^3", space)};
  std::vector<std::vector<MultiPoly>> g{{MultiPoly(space)}, {parse_poly("x2", space)}};

  MultiPoly xi() const {
    std::vector<MultiPoly> gcol{g[0][0], g[1][0]};
    MultiPoly u = MultiPoly::variable(space, 2);
    return lie_derivative(h, f) + lie_derivative(h, gcol) * u + 3.0 * h;
  }
};

ReachResult box_reach(const IntervalVector& state_box) {
  Zonotope tube = Zonotope::from_box(state_box);
  IntervalVector hull = interval_hull(tube);
  return ReachResult{tube, tube, hull, hull, 0};
}

MultiPoly random_poly(const VarSpacePtr& space, int max_degree, int n_terms,
                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-5.0, 5.0);
  std::uniform_int_distribution<int> expo(0, max_degree);
  MultiPoly p(space);
  for (int t = 0; t < n_terms; ++t) {
    Mono m(static_cast<size_t>(space->dim()), 0);
    int budget = max_degree;
    for (int v = 0; v < space->dim() && budget > 0; ++v) {
      int e = std::min(expo(rng), budget);
      m[static_cast<size_t>(v)] = static_cast<uint32_t>(e);
      budget -= e;
    }
    p.add_term(m, coeff(rng));
  }
  return p;
}

double grid_min(const MultiPoly& p, const IntervalVector& box, int points_per_axis) {
  int dim = box.size();
  std::vector<int> idx(static_cast<size_t>(dim), 0);
  Eigen::VectorXd z(dim);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (int v = 0; v < dim; ++v) {
      double t = static_cast<double>(idx[static_cast<size_t>(v)]) / (points_per_axis - 1);
      z[v] = box[v].lo() + t * (box[v].hi() - box[v].lo());
    }
    best = std::min(best, p.eval(z));
    int v = 0;
    while (v < dim && ++idx[static_cast<size_t>(v)] == points_per_axis) {
      idx[static_cast<size_t>(v)] = 0;
      ++v;
    }
    if (v == dim) break;
  }
  return best;
}

}  // namespace

TEST_CASE("delta_xi vanishes at the anchor and drops pure input terms") {
  Example1 ex;
  MultiPoly xi = ex.xi();
  Eigen::VectorXd anchor(2);
  anchor << -2.0, 1.0;
  MultiPoly dxi = delta_xi(xi, anchor);

  std::vector<std::pair<int, double>> at_anchor{{0, anchor[0]}, {1, anchor[1]}};
  CHECK(dxi.substituted(at_anchor).is_zero());

  MultiPoly state_free = parse_poly("2*u1 + 5", ex.space);
  CHECK(delta_xi(state_free, anchor).is_zero());

  Eigen::VectorXd bad(3);
  bad << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(delta_xi(xi, bad), DimensionError);
}

TEST_CASE("delta_xi matches the direct evaluation oracle") {
  Example1 ex;
  MultiPoly xi = ex.xi();
  Eigen::VectorXd anchor(2);
  anchor << -2.0, 1.0;
  MultiPoly dxi = delta_xi(xi, anchor);

  std::mt19937_64 rng(90210);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  for (int s = 0; s < 1000; ++s) {
    Eigen::VectorXd z(3), za(3);
    z << unit(rng), unit(rng), unit(rng);
    za << anchor[0], anchor[1], z[2];
    double direct = xi.eval(z) - xi.eval(za);
    double got = dxi.eval(z);
    REQUIRE(std::abs(got - direct) <= 1e-9 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("assemble_zk is the hull cross the input box") {
  Eigen::VectorXd c(2);
  c << -2.0, 1.0;
  ReachResult rr = box_reach(IntervalVector::from_center_radius(c, 0.25));
  IntervalVector U(1);
  U[0] = Interval(-1.0, 1.0);
  IntervalVector zk = assemble_zk(rr, U);
  REQUIRE(zk.size() == 3);
  CHECK(zk[0] == rr.hull[0]);
  CHECK(zk[1] == rr.hull[1]);
  CHECK(zk[2] == Interval(-1.0, 1.0));
}

TEST_CASE("ball box enclosure contains sampled measurement errors") {
  Eigen::VectorXd center(3);
  center << 0.4, -1.2, 2.0;
  double eps = 0.1;
  IntervalVector box = IntervalVector::from_center_radius(center, eps);
  std::mt19937_64 rng(555);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 10000; ++s) {
    Eigen::VectorXd d(3);
    d << gauss(rng), gauss(rng), gauss(rng);
    d *= eps * std::pow(unit(rng), 1.0 / 3.0) / d.norm();
    REQUIRE(d.norm() <= eps + 1e-12);
    REQUIRE(box.contains(center + d));
  }
}

TEST_CASE("lower_bound_poly handles constants exactly") {
  auto space = VarSpace::make(2, 0);
  IntervalVector box = IntervalVector::from_center_radius(Eigen::VectorXd::Zero(2), 1.0);
  CHECK(lower_bound_poly(MultiPoly::constant(space, -7.25), box) == -7.25);
  CHECK(lower_bound_poly(MultiPoly(space), box) == 0.0);
}

TEST_CASE("lower_bound_poly affine path matches the corner minimum") {
  auto space = VarSpace::make(4, 0);
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> coeff(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    MultiPoly p = MultiPoly::constant(space, coeff(rng));
    Eigen::VectorXd cs(4);
    for (int v = 0; v < 4; ++v) {
      cs[v] = coeff(rng);
      p = p + cs[v] * MultiPoly::variable(space, v);
    }
    IntervalVector box(4);
    for (int v = 0; v < 4; ++v) {
      double a = coeff(rng), b = coeff(rng);
      box[v] = Interval(std::min(a, b), std::max(a, b));
    }
    double corner = p.constant_term();
    for (int v = 0; v < 4; ++v) corner += cs[v] * (cs[v] > 0 ? box[v].lo() : box[v].hi());
    PopStats stats;
    double lb = lower_bound_poly(p, box, 1e-6, 20000, &stats);
    CHECK(stats.nodes == 0);
    REQUIRE(lb <= corner + 1e-12);
    REQUIRE(corner - lb <= 1e-9 * (1.0 + std::abs(corner)));
  }
}

TEST_CASE("lower_bound_poly brackets the minimum of x squared") {
  auto space = VarSpace::make(1, 0);
  MultiPoly p = parse_poly("x1^2", space);
  IntervalVector box(1);
  box[0] = Interval(-1.0, 2.0);
  double lb = lower_bound_poly(p, box);
  CHECK(lb <= 0.0);
  CHECK(lb >= -1e-6);
}

TEST_CASE("lower_bound_poly never exceeds the dense grid minimum") {
  std::mt19937_64 rng(20240101);
  std::uniform_int_distribution<int> dim_pick(1, 3);
  int tight = 0;
  const int trials = 30;
  for (int trial = 0; trial < trials; ++trial) {
    int dim = dim_pick(rng);
    auto space = VarSpace::make(dim, 0);
    MultiPoly p = random_poly(space, 4, 3 * dim + 2, rng);
    IntervalVector box = IntervalVector::from_center_radius(Eigen::VectorXd::Zero(dim), 1.0);
    double gm = grid_min(p, box, 41);
    double lb = lower_bound_poly(p, box, 1e-6, 10000);
    REQUIRE(lb <= gm + 1e-12);
    if (gm - lb <= 1e-3) ++tight;
  }
  CHECK(tight >= trials * 95 / 100);
}

TEST_CASE("lower_bound_poly respects the node budget") {
  auto space = VarSpace::make(3, 0);
  // Triple double-well: interior minima in every coordinate, so monotonicity
  // reduction cannot collapse the search and the budget actually binds.
  MultiPoly p = parse_poly(
      "x1^4 - x1^2 + x2^4 - x2^2 + x3^4 - x3^2 + 0.3*x1*x2*x3", space);
  IntervalVector box = IntervalVector::from_center_radius(Eigen::VectorXd::Zero(3), 1.0);
  PopStats tiny_stats, big_stats;
  double lb_tiny = lower_bound_poly(p, box, 1e-12, 8, &tiny_stats);
  double lb_big = lower_bound_poly(p, box, 1e-12, 20000, &big_stats);
  CHECK(tiny_stats.nodes <= 8);
  CHECK(tiny_stats.budget_hit);
  CHECK(big_stats.nodes > tiny_stats.nodes);
  CHECK(lb_tiny <= lb_big + 1e-12);  // less work can only loosen the bound
  double gm = grid_min(p, box, 41);
  CHECK(lb_tiny <= gm + 1e-12);
  CHECK(lb_big <= gm + 1e-12);
}

TEST_CASE("lower_bound_poly rejects bad arguments") {
  auto space = VarSpace::make(2, 0);
  MultiPoly p = parse_poly("x1*x2", space);
  IntervalVector box = IntervalVector::from_center_radius(Eigen::VectorXd::Zero(2), 1.0);
  IntervalVector small(1);
  small[0] = Interval(-1.0, 1.0);
  CHECK_THROWS_AS(lower_bound_poly(p, small), DimensionError);
  CHECK_THROWS_AS(lower_bound_poly(p, box, 0.0), DomainError);
  CHECK_THROWS_AS(lower_bound_poly(p, box, 1e-6, 0), DomainError);
  IntervalVector unbounded(2);
  unbounded[0] = Interval(0.0, std::numeric_limits<double>::infinity());
  unbounded[1] = Interval(-1.0, 1.0);
  CHECK_THROWS_AS(lower_bound_poly(p, unbounded), DomainError);
}

TEST_CASE("compute_margin is exactly zero for state-free xi") {
  auto space = VarSpace::make(2, 1);
  MultiPoly xi = parse_poly("u1 + 5", space);
  Eigen::VectorXd anchor(2);
  anchor << 0.3, -0.4;
  ReachResult rr = box_reach(IntervalVector::from_center_radius(anchor, 0.2));
  IntervalVector U(1);
  U[0] = Interval(-1.0, 1.0);
  MarginRequest req{xi, anchor, Eigen::VectorXd::Zero(1), 0.02, 0.0, 2};
  MarginResult res = compute_margin(req, rr, U);
  CHECK(res.phi == 0.0);
  CHECK(res.remainder_lo == 0.0);
  CHECK(res.poly_lo == 0.0);
}

TEST_CASE("compute_margin validates the expansion point") {
  Example1 ex;
  Eigen::VectorXd anchor(2);
  anchor << -2.0, 1.0;
  ReachResult rr = box_reach(IntervalVector::from_center_radius(anchor, 0.1));
  IntervalVector U(1);
  U[0] = Interval(-1.0, 1.0);

  Eigen::VectorXd off_center(1);
  off_center << 0.5;
  MarginRequest bad_center{ex.xi(), anchor, off_center, 0.02, 0.0, 2};
  CHECK_THROWS_AS(compute_margin(bad_center, rr, U), DomainError);

  Eigen::VectorXd far(2);
  far << 5.0, 5.0;
  MarginRequest bad_anchor{ex.xi(), far, Eigen::VectorXd::Zero(1), 0.02, 0.0, 2};
  CHECK_THROWS_AS(compute_margin(bad_anchor, rr, U), DomainError);
}

TEST_CASE("margin vanishes linearly as the sampling interval shrinks") {
  Example1 ex;
  Eigen::VectorXd anchor(2);
  anchor << -2.0, 1.0;
  IntervalVector U(1);
  U[0] = Interval(-1.0, 1.0);
  auto phi_at = [&](double dt) {
    ReachResult rr = reach_step(ex.f, ex.g, Zonotope::point(anchor), U, dt);
    MarginRequest req{ex.xi(), anchor, Eigen::VectorXd::Zero(1), dt, 0.0, 2};
    return compute_margin(req, rr, U).phi;
  };
  // The exact minimum of delta-xi over the true tube at dt = 1e-5 is about
  // -1.40e-3 (dominated by the 11*w2 + 4*|u|*w2 slope times the 9e-5 state
  // excursion), so the bound can only vanish at the same linear rate.
  double p4 = phi_at(1e-4);
  double p5 = phi_at(1e-5);
  double p7 = phi_at(1e-7);
  CHECK(std::abs(p5) <= 2e-3);
  CHECK(std::abs(p5) <= 0.15 * std::abs(p4));
  CHECK(std::abs(p7) <= 1.5e-5);
}

TEST_CASE("margin lower-bounds delta_xi over the joint box") {
  Example1 ex;
  Eigen::VectorXd anchor(2);
  anchor << -2.0, 1.0;
  IntervalVector U(1);
  U[0] = Interval(-1.0, 1.0);
  ReachResult rr = reach_step(ex.f, ex.g, Zonotope::point(anchor), U, 0.02);
  MarginRequest req{ex.xi(), anchor, Eigen::VectorXd::Zero(1), 0.02, 0.0, 2};
  MarginResult res = compute_margin(req, rr, U);

  CHECK(res.phi == res.remainder_lo + res.poly_lo);
  CHECK(res.phi < 0.0);
  CHECK(res.zk_hull[2] == Interval(-1.0, 1.0));

  MultiPoly dxi = delta_xi(ex.xi(), anchor);
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 100000; ++s) {
    Eigen::VectorXd z(3);
    for (int i = 0; i < 3; ++i)
      z[i] = res.zk_hull[i].lo() + unit(rng) * (res.zk_hull[i].hi() - res.zk_hull[i].lo());
    double v = dxi.eval(z);
    worst = std::min(worst, v);
    REQUIRE(v >= res.phi);
  }
  CHECK(res.phi <= worst);
}

TEST_CASE("margin is monotone in measurement radius and sampling interval") {
  Example1 ex;
  Eigen::VectorXd anchor(2);
  anchor << -2.0, 1.0;
  IntervalVector U(1);
  U[0] = Interval(-1.0, 1.0);

  double prev = 1.0;
  bool first = true;
  for (double eps : {0.0, 0.05, 0.1, 0.15}) {
    Zonotope X0 = eps == 0.0 ? Zonotope::point(anchor)
                             : Zonotope::from_box(IntervalVector::from_center_radius(anchor, eps));
    ReachResult rr = reach_step(ex.f, ex.g, X0, U, 0.02);
    MarginRequest req{ex.xi(), anchor, Eigen::VectorXd::Zero(1), 0.02, eps, 2};
    MarginResult res = compute_margin(req, rr, U);
    if (!first) CHECK(res.phi <= prev + 1.1e-6);
    prev = res.phi;
    first = false;
  }

  prev = 1.0;
  first = true;
  for (double dt : {0.005, 0.01, 0.02, 0.04}) {
    ReachResult rr = reach_step(ex.f, ex.g, Zonotope::point(anchor), U, dt);
    MarginRequest req{ex.xi(), anchor, Eigen::VectorXd::Zero(1), dt, 0.0, 2};
    MarginResult res = compute_margin(req, rr, U);
    if (!first) CHECK(res.phi <= prev + 1.1e-6);
    prev = res.phi;
    first = false;
  }
}

TEST_CASE("check_initial_condition accepts the mass-spring start") {
  auto space = VarSpace::make(2, 1);
  MultiPoly h = parse_poly("10 - 25*(x1 - 0.5)^2", space);
  std::vector<MultiPoly> f{parse_poly("x2", space),
                           parse_poly("-33.333333333333336*x1 - 2*x2", space)};
  std::vector<MultiPoly> chain{h, lie_derivative(h, f) + 10.0 * h};
  Eigen::VectorXd x0(2);
  x0 << 0.5, -1.0;
  CHECK(check_initial_condition(chain, x0, 0.0));
  CHECK(check_initial_condition(chain, x0, 0.05));
}

TEST_CASE("check_initial_condition sees past the point estimate") {
  auto space = VarSpace::make(2, 1);
  MultiPoly h = parse_poly("x1", space);
  std::vector<MultiPoly> chain{h};
  Eigen::VectorXd x0(2);
  x0 << 0.05, 0.0;
  CHECK(h.eval(Eigen::Vector3d(0.05, 0.0, 0.0)) > 0.0);
  CHECK(check_initial_condition(chain, x0, 0.0));
  CHECK_FALSE(check_initial_condition(chain, x0, 0.1));
}

TEST_CASE("check_initial_condition rejects input-dependent chains") {
  auto space = VarSpace::make(2, 1);
  std::vector<MultiPoly> chain{parse_poly("x1 + u1", space)};
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(check_initial_condition(chain, x0, 0.1), RelativeDegreeError);
}
