#include <doctest.h>

#include <random>

#include "sdcbf/zonotope.hpp"

using namespace sdcbf;

namespace {

Eigen::VectorXd sample_point(const Zonotope& Z, const Eigen::VectorXd& beta) {
  return Z.center + Z.generators * beta;
}

std::vector<Eigen::VectorXd> beta_grid(int g, int steps) {
  std::vector<Eigen::VectorXd> out;
  int total = 1;
  for (int i = 0; i < g; ++i) total *= steps;
  for (int idx = 0; idx < total; ++idx) {
    Eigen::VectorXd b(g);
    int rest = idx;
    for (int i = 0; i < g; ++i) {
      int q = rest % steps;
      rest /= steps;
      b[i] = steps == 1 ? 0.0 : -1.0 + 2.0 * q / (steps - 1);
    }
    out.push_back(b);
  }
  return out;
}

bool contains_tol(const IntervalVector& h, const Eigen::VectorXd& p, double tol) {
  for (int i = 0; i < h.size(); ++i) {
    double eps = tol * (1.0 + std::abs(p[i]));
    if (p[i] < h[i].lo() - eps || p[i] > h[i].hi() + eps) return false;
  }
  return true;
}

Zonotope random_zonotope(int n, int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::VectorXd c(n);
  Eigen::MatrixXd G(n, g);
  for (int i = 0; i < n; ++i) c[i] = u(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < g; ++j) G(i, j) = u(rng);
  return Zonotope{c, G};
}

}  // namespace

TEST_CASE("zonotope basics and hull") {
  Eigen::VectorXd c(2);
  c << 1.0, 1.0;
  Eigen::MatrixXd G(2, 2);
  G << 1.0, 1.0, 0.0, 1.0;
  Zonotope Z{c, G};
  IntervalVector h = interval_hull(Z);
  CHECK(h[0].lo() == -1.0);
  CHECK(h[0].hi() == 3.0);
  CHECK(h[1].lo() == 0.0);
  CHECK(h[1].hi() == 2.0);

  Zonotope P = Zonotope::point(c);
  CHECK(P.num_generators() == 0);
  IntervalVector hp = interval_hull(P);
  CHECK(hp[0] == Interval(1.0));

  IntervalVector box(2);
  box[0] = Interval(-1.0, 1.0);
  box[1] = Interval(2.0, 2.0);
  Zonotope B = Zonotope::from_box(box);
  CHECK(B.num_generators() == 1);
  CHECK(B.center[1] == 2.0);
  IntervalVector hb = interval_hull(B);
  CHECK(hb.contains(box));
}

TEST_CASE("zonotope identity map leaves set unchanged") {
  std::mt19937_64 rng(7);
  Zonotope Z = random_zonotope(3, 4, rng);
  Zonotope M = linear_map(Eigen::MatrixXd::Identity(3, 3), Z);
  CHECK(M.center == Z.center);
  CHECK(M.generators == Z.generators);
  CHECK_THROWS_AS(linear_map(Eigen::MatrixXd::Identity(2, 2), Z), DimensionError);
}

TEST_CASE("minkowski sum of boxes") {
  IntervalVector box(2);
  box[0] = Interval(-1.0, 1.0);
  box[1] = Interval(-1.0, 1.0);
  Zonotope B = Zonotope::from_box(box);
  Zonotope S = minkowski_sum(B, B);
  IntervalVector h = interval_hull(S);
  CHECK(h[0].lo() == -2.0);
  CHECK(h[0].hi() == 2.0);
  CHECK(h[1].lo() == -2.0);
  CHECK(h[1].hi() == 2.0);
}

TEST_CASE("zonotope operations match beta-grid enumeration") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    Zonotope Z = random_zonotope(3, 4, rng);
    auto grid = beta_grid(4, 3);

    IntervalVector h = interval_hull(Z);
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, 1e100);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, -1e100);
    for (const auto& b : grid) {
      Eigen::VectorXd pnt = sample_point(Z, b);
      REQUIRE(h.contains(pnt));
      lo = lo.cwiseMin(pnt);
      hi = hi.cwiseMax(pnt);
    }
    for (int i = 0; i < 3; ++i) {
      CHECK(h[i].lo() == doctest::Approx(lo[i]).epsilon(1e-12));
      CHECK(h[i].hi() == doctest::Approx(hi[i]).epsilon(1e-12));
    }

    Eigen::MatrixXd M(2, 3);
    M << 1.0, 0.5, -1.0, 0.0, 2.0, 0.25;
    Zonotope MZ = linear_map(M, Z);
    IntervalVector mh = interval_hull(MZ);
    for (const auto& b : grid) REQUIRE(contains_tol(mh, M * sample_point(Z, b), 1e-12));

    Zonotope Z2 = random_zonotope(3, 2, rng);
    Zonotope S = minkowski_sum(Z, Z2);
    IntervalVector sh = interval_hull(S);
    auto grid2 = beta_grid(2, 3);
    for (const auto& b : grid)
      for (const auto& b2 : grid2) REQUIRE(contains_tol(sh, sample_point(Z, b) + sample_point(Z2, b2), 1e-12));
  }
}

TEST_CASE("paired convex hull encloses segments") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    Zonotope a = random_zonotope(2, 3, rng);
    Eigen::MatrixXd M(2, 2);
    M << 1.1, 0.2, -0.1, 0.9;
    Zonotope b = linear_map(M, a);
    Zonotope ch = convex_hull_paired(a, b);
    IntervalVector h = interval_hull(ch);
    for (const auto& beta : beta_grid(3, 3)) {
      Eigen::VectorXd pa = sample_point(a, beta);
      Eigen::VectorXd pb = sample_point(b, beta);
      for (double lam = 0.0; lam <= 1.0; lam += 0.25)
        REQUIRE(contains_tol(h, lam * pa + (1.0 - lam) * pb, 1e-12));
    }
  }
  Zonotope z2 = random_zonotope(2, 2, rng);
  Zonotope z3 = random_zonotope(2, 3, rng);
  CHECK_THROWS_AS(convex_hull_paired(z2, z3), DimensionError);
}

TEST_CASE("generator reduction is a sound enclosure") {
  std::mt19937_64 rng(777);
  Zonotope Z = random_zonotope(2, 10, rng);
  Zonotope R = reduce_generators(Z, 4);
  CHECK(R.num_generators() <= 4);
  IntervalVector rh = interval_hull(R);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 2000; ++s) {
    Eigen::VectorXd b(10);
    for (int i = 0; i < 10; ++i) b[i] = u(rng);
    REQUIRE(contains_tol(rh, sample_point(Z, b), 1e-12));
  }
  Zonotope same = reduce_generators(Z, 16);
  CHECK(same.num_generators() == 10);
}
