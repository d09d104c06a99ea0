#include <doctest.h>

#include <cmath>
#include <random>

#include "sdcbf/controller.hpp"

using namespace sdcbf;

namespace {

IntervalVector sym_box(int m, double half) {
  IntervalVector v(m);
  for (int j = 0; j < m; ++j) v[j] = Interval(-half, half);
  return v;
}

struct Example1 {
  VarSpacePtr space = VarSpace::make(2, 1);
  MultiPoly h = parse_poly("-x2^2 - x1 + 1", space);
  std::vector<MultiPoly> f{parse_poly("-0.6*x1 - x2", space), parse_poly("x1^3", space)};
  std::vector<std::vector<MultiPoly>> g{{MultiPoly(space)}, {parse_poly("x2", space)}};
  ControlAffineSystem sys() const { return {f, g, sym_box(1, 1.0), 0.1}; }
};

struct Example2 {
  VarSpacePtr space = VarSpace::make(2, 1);
  MultiPoly h = parse_poly("10 - 25*(x1 - 0.5)^2", space);
  std::vector<MultiPoly> f{parse_poly("x2", space),
                           parse_poly("-33.333333333333336*x1 - 2*x2", space)};
  std::vector<std::vector<MultiPoly>> g{{MultiPoly(space)},
                                        {MultiPoly::constant(space, 2.0 / 3.0)}};
  ControlAffineSystem sys() const { return {f, g, sym_box(1, 10.0), 0.1}; }
};

struct Example3 {
  VarSpacePtr space = VarSpace::make(6, 3);
  std::vector<MultiPoly> f{parse_poly("x4", space), parse_poly("x5", space),
                           parse_poly("x6", space), MultiPoly(space),
                           MultiPoly(space),        MultiPoly(space)};
  std::vector<std::vector<MultiPoly>> g = [this] {
    std::vector<std::vector<MultiPoly>> rows(6, std::vector<MultiPoly>(3, MultiPoly(space)));
    for (int j = 0; j < 3; ++j) rows[static_cast<size_t>(3 + j)][static_cast<size_t>(j)] =
        MultiPoly::constant(space, 1.0);
    return rows;
  }();
  std::vector<MultiPoly> barriers{
      parse_poly("0.5 - x1", space), parse_poly("x1 + 0.5", space),
      parse_poly("0.5 - x2", space), parse_poly("x2 + 0.5", space),
      parse_poly("0.6 - x3", space), parse_poly("x3", space)};
  ControlAffineSystem sys() const { return {f, g, sym_box(3, 2.0), 0.01}; }
};

}  // namespace

TEST_CASE("relative degree detection across the examples") {
  Example1 e1;
  Eigen::VectorXd x1(2);
  x1 << -2.0, 1.0;
  CHECK(relative_degree(e1.h, e1.sys(), {x1}) == 1);

  Example2 e2;
  Eigen::VectorXd x2(2), x2_off(2);
  x2 << 0.5, -1.0;
  x2_off << 0.6, -1.0;
  CHECK(relative_degree(e2.h, e2.sys(), {x2, x2_off}) == 2);
  // The input coefficient vanishes exactly at x1 = 0.5, so a probe set
  // containing only the initial state cannot certify the degree.
  CHECK_THROWS_AS(relative_degree(e2.h, e2.sys(), {x2}), RelativeDegreeError);

  Example3 e3;
  Eigen::VectorXd x3 = Eigen::VectorXd::Zero(6);
  for (const auto& h : e3.barriers) CHECK(relative_degree(h, e3.sys(), {x3}) == 2);
}

TEST_CASE("relative degree error paths") {
  Example1 e1;
  Eigen::VectorXd x(2);
  x << -2.0, 1.0;
  CHECK_THROWS_AS(relative_degree(e1.h, e1.sys(), {}), DomainError);

  MultiPoly bad_h = parse_poly("x1 + u1", e1.space);
  CHECK_THROWS_AS(relative_degree(bad_h, e1.sys(), {x}), DomainError);

  ControlAffineSystem no_gain = e1.sys();
  no_gain.g = {{MultiPoly(e1.space)}, {MultiPoly(e1.space)}};
  CHECK_THROWS_AS(relative_degree(e1.h, no_gain, {x}), RelativeDegreeError);
}

TEST_CASE("xi assembly for relative degree one") {
  Example1 ex;
  CBFSpec spec{ex.h, 3.0, {}, {}};
  MultiPoly xi = build_xi(spec, ex.sys(), 1);

  std::vector<MultiPoly> gcol{ex.g[0][0], ex.g[1][0]};
  MultiPoly expected = lie_derivative(ex.h, ex.f) +
                       lie_derivative(ex.h, gcol) * MultiPoly::variable(ex.space, 2) +
                       3.0 * ex.h;
  CHECK(xi == expected);
  CHECK(xi.derivative(2) == lie_derivative(ex.h, gcol));

  CBFSpec bad{ex.h, 0.0, {}, {}};
  CHECK_THROWS_AS(build_xi(bad, ex.sys(), 1), DomainError);
}

TEST_CASE("xi assembly for relative degree two") {
  Example2 ex;
  Eigen::VectorXd a(2);
  a << 20.0, 100.0;
  CBFSpec spec{ex.h, 0.0, a, {}};
  MultiPoly xi = build_xi(spec, ex.sys(), 2);

  MultiPoly lfh = lie_derivative(ex.h, ex.f);
  MultiPoly lf2h = lie_derivative(lfh, ex.f);
  std::vector<MultiPoly> gcol{ex.g[0][0], ex.g[1][0]};
  MultiPoly lglfh = lie_derivative(lfh, gcol);
  MultiPoly expected =
      lf2h + lglfh * MultiPoly::variable(ex.space, 2) + 20.0 * lfh + 100.0 * ex.h;
  CHECK(xi == expected);
  CHECK(xi.derivative(2) == lglfh);

  Eigen::VectorXd z(3);
  z << 0.8, -1.0, 0.0;
  CHECK(lglfh.eval(z) == doctest::Approx(-100.0 / 3.0 * 0.3).epsilon(1e-12));

  Eigen::VectorXd short_a(1);
  short_a << 20.0;
  CBFSpec bad{ex.h, 0.0, short_a, {}};
  CHECK_THROWS_AS(build_xi(bad, ex.sys(), 2), DomainError);

  // Claiming degree 2 for the degree-1 barrier must be rejected.
  Example1 e1;
  CBFSpec wrong{e1.h, 0.0, a, {}};
  CHECK_THROWS_AS(build_xi(wrong, e1.sys(), 2), RelativeDegreeError);
}

TEST_CASE("s chain assembly and telescoping") {
  Example2 ex;
  Eigen::VectorXd lambdas(2);
  lambdas << 10.0, 10.0;
  CBFSpec spec{ex.h, 0.0, {}, lambdas};
  auto chain = build_s_chain(spec, ex.sys(), 2);
  REQUIRE(chain.size() == 2);
  CHECK(chain[0] == ex.h);

  MultiPoly lfh = lie_derivative(ex.h, ex.f);
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int s = 0; s < 200; ++s) {
    Eigen::VectorXd z(3);
    z << coord(rng), coord(rng), 0.0;
    double s1 = chain[1].eval(z);
    double direct = lfh.eval(z) + 10.0 * ex.h.eval(z);
    REQUIRE(std::abs(s1 - direct) <= 1e-10 * (1.0 + std::abs(direct)));
    // d s0/dt along the drift equals s1 - lambda1 s0
    double tele = chain[1].eval(z) - 10.0 * chain[0].eval(z);
    REQUIRE(std::abs(lfh.eval(z) - tele) <= 1e-10 * (1.0 + std::abs(tele)));
  }

  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(2);
  CBFSpec pure{ex.h, 0.0, {}, zeros};
  auto diff_chain = build_s_chain(pure, ex.sys(), 2);
  CHECK(diff_chain[1] == lfh);  // lambda = 0 degenerates to differentiation

  CHECK_THROWS_AS(build_s_chain(spec, ex.sys(), 1), DomainError);
  Eigen::VectorXd negative(2);
  negative << -1.0, 2.0;
  CBFSpec bad{ex.h, 0.0, {}, negative};
  CHECK_THROWS_AS(build_s_chain(bad, ex.sys(), 2), DomainError);
}

TEST_CASE("a and lambda conversions agree") {
  Eigen::VectorXd l24(2);
  l24 << 2.0, 4.0;
  Eigen::VectorXd a = a_from_lambdas(l24);
  CHECK(a[0] == 6.0);
  CHECK(a[1] == 8.0);
  Eigen::VectorXd back = lambdas_from_a(a);
  CHECK(back[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(back[1] == doctest::Approx(4.0).epsilon(1e-9));

  Eigen::VectorXd a2(2);
  a2 << 20.0, 100.0;
  Eigen::VectorXd l2 = lambdas_from_a(a2);  // double root at 10
  CHECK(l2[0] == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(l2[1] == doctest::Approx(10.0).epsilon(1e-6));
  Eigen::VectorXd a2back = a_from_lambdas(l2);
  CHECK(a2back[0] == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(a2back[1] == doctest::Approx(100.0).epsilon(1e-9));

  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> pick(0.5, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    int r = 2 + static_cast<int>(trial % 3);
    Eigen::VectorXd l(r);
    for (int i = 0; i < r; ++i) l[i] = pick(rng);
    std::sort(l.data(), l.data() + r);
    Eigen::VectorXd coeffs = a_from_lambdas(l);
    Eigen::VectorXd rec = lambdas_from_a(coeffs);
    for (int i = 0; i < r; ++i) REQUIRE(std::abs(rec[i] - l[i]) <= 1e-7 * (1.0 + l[i]));
  }

  Eigen::VectorXd complex_pair(2);
  complex_pair << 1.0, 1.0;  // discriminant < 0
  CHECK_THROWS_AS(lambdas_from_a(complex_pair), DomainError);
  Eigen::VectorXd unstable(2);
  unstable << -3.0, 2.0;  // roots +1 and +2
  CHECK_THROWS_AS(lambdas_from_a(unstable), DomainError);
  Eigen::VectorXd marginal(2);
  marginal << 1.0, 0.0;  // root at zero
  CHECK_THROWS_AS(lambdas_from_a(marginal), DomainError);
}

TEST_CASE("input box shrinking") {
  IntervalVector U = sym_box(1, 1.0);
  CHECK(shrink_input_box(U, 0.0) == U);

  IntervalVector S = shrink_input_box(U, 0.1);
  CHECK(S[0].lo() == doctest::Approx(-0.9).epsilon(1e-14));
  CHECK(S[0].hi() == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(S[0].lo() >= -0.9);
  CHECK(S[0].hi() <= 0.9);

  std::mt19937_64 rng(1212);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  IntervalVector U3 = sym_box(3, 1.0);
  IntervalVector S3 = shrink_input_box(U3, 0.1);
  for (int s = 0; s < 10000; ++s) {
    Eigen::VectorXd u(3), d(3);
    for (int j = 0; j < 3; ++j)
      u[j] = S3[j].lo() + 0.5 * (unit(rng) + 1.0) * (S3[j].hi() - S3[j].lo());
    for (int j = 0; j < 3; ++j) d[j] = unit(rng);
    if (d.norm() > 1.0) d /= d.norm();
    d *= 0.1;
    REQUIRE(U3.contains(u + d));
  }

  CHECK_THROWS_AS(shrink_input_box(U, 1.2), InfeasibleInputSet);
  CHECK_THROWS_AS(shrink_input_box(U, -0.1), DomainError);
  IntervalVector degenerate = shrink_input_box(U, 1.0);
  CHECK(degenerate[0].lo() == 0.0);
  CHECK(degenerate[0].hi() == 0.0);
}

TEST_CASE("constraint assembly at the anchor") {
  Example1 ex;
  CBFSpec spec{ex.h, 3.0, {}, {}};
  MultiPoly xi = build_xi(spec, ex.sys(), 1);
  Eigen::VectorXd anchor(2);
  anchor << -2.0, 1.0;

  LinearConstraint naive = make_constraint(xi, anchor, 0.0);
  CHECK(naive.row[0] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(naive.rhs == doctest::Approx(21.8).epsilon(1e-14));

  LinearConstraint withphi = make_constraint(xi, anchor, -0.3);
  CHECK(withphi.rhs == doctest::Approx(21.5).epsilon(1e-14));

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  for (int s = 0; s < 1000; ++s) {
    double u = pick(rng);
    Eigen::VectorXd z(3);
    z << anchor[0], anchor[1], u;
    double via_row = withphi.row[0] * u + withphi.rhs;
    double direct = xi.eval(z) - 0.3;
    REQUIRE(std::abs(via_row - direct) <= 1e-10 * (1.0 + std::abs(direct)));
  }

  MultiPoly quadratic_u = parse_poly("x1 + u1^2", ex.space);
  CHECK_THROWS_AS(make_constraint(quadratic_u, anchor, 0.0), DomainError);
  Eigen::VectorXd wrong_dim(3);
  wrong_dim << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(make_constraint(xi, wrong_dim, 0.0), DimensionError);
}
