#include "sdcbf/reach.hpp"

#include <cmath>

#include "sdcbf/errors.hpp"

namespace sdcbf {

namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= static_cast<double>(i);
  return r;
}

double inf_norm_up(const Eigen::MatrixXd& A) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) row = rnd::add_dir(row, std::abs(A(i, j)), true);
    best = std::max(best, row);
  }
  return best;
}

IntervalVector scale(const IntervalVector& v, const Interval& s) {
  IntervalVector r(v.size());
  for (int i = 0; i < v.size(); ++i) r[i] = v[i] * s;
  return r;
}

double max_mag(const IntervalVector& v) {
  double m = 0.0;
  for (int i = 0; i < v.size(); ++i) m = std::max(m, v[i].mag());
  return m;
}

IntervalVector symmetric_box(int n, double radius) {
  IntervalVector r(n);
  for (int i = 0; i < n; ++i) r[i] = Interval(-radius, radius);
  return r;
}

std::vector<MultiPoly> stack_field(const std::vector<MultiPoly>& f,
                                   const std::vector<std::vector<MultiPoly>>& g) {
  if (f.empty()) throw DimensionError("reach: empty vector field");
  const auto& space = f[0].space();
  int n = space->state_dim(), m = space->input_dim();
  if (static_cast<int>(f.size()) != n) throw DimensionError("reach: f length must equal state dimension");
  if (static_cast<int>(g.size()) != n) throw DimensionError("reach: g row count must equal state dimension");
  std::vector<MultiPoly> F;
  F.reserve(f.size());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(g[static_cast<size_t>(i)].size()) != m)
      throw DimensionError("reach: g column count must equal input dimension");
    if (f[static_cast<size_t>(i)].depends_on_inputs())
      throw DomainError("reach: drift term must not depend on inputs");
    MultiPoly Fi = f[static_cast<size_t>(i)];
    for (int j = 0; j < m; ++j) {
      const MultiPoly& gij = g[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (gij.depends_on_inputs()) throw DomainError("reach: input matrix must not depend on inputs");
      Fi = Fi + gij * MultiPoly::variable(space, n + j);
    }
    F.push_back(std::move(Fi));
  }
  return F;
}

}  // namespace

LinearizedSystem linearize(const std::vector<MultiPoly>& f,
                           const std::vector<std::vector<MultiPoly>>& g,
                           const Eigen::VectorXd& x_star, const Eigen::VectorXd& u_star,
                           const IntervalVector& state_box, const IntervalVector& input_box) {
  std::vector<MultiPoly> F = stack_field(f, g);
  const auto& space = f[0].space();
  int n = space->state_dim(), m = space->input_dim();
  if (x_star.size() != n || u_star.size() != m)
    throw DimensionError("linearize: expansion point dimension mismatch");
  if (state_box.size() != n || input_box.size() != m)
    throw DimensionError("linearize: box dimension mismatch");
  if (!state_box.contains(x_star)) throw DomainError("linearize: x_star outside state box");
  if (!input_box.contains(u_star)) throw DomainError("linearize: u_star outside input box");

  Eigen::VectorXd z_star(n + m);
  z_star << x_star, u_star;
  IntervalVector z_box = concat(state_box, input_box);
  IntervalVector dz = z_box - z_star;

  Eigen::MatrixXd A(n, n), B(n, m);
  Eigen::VectorXd c(n);
  IntervalVector L(n);
  for (int i = 0; i < n; ++i) {
    const MultiPoly& Fi = F[static_cast<size_t>(i)];
    c[i] = Fi.eval(z_star);
    for (int k = 0; k < n; ++k) A(i, k) = Fi.derivative(k).eval(z_star);
    for (int j = 0; j < m; ++j) B(i, j) = g[static_cast<size_t>(i)][static_cast<size_t>(j)].eval(z_star);
    Interval acc(0.0);
    for (int k = 0; k < n + m; ++k) {
      MultiPoly dk = Fi.derivative(k);
      for (int l = k; l < n + m; ++l) {
        MultiPoly dkl = dk.derivative(l);
        if (dkl.is_zero()) continue;
        Interval h = dkl.eval_box(z_box) * dz[k] * dz[l];
        acc = acc + (l == k ? h : Interval(2.0) * h);
      }
    }
    L[i] = Interval(0.5) * acc;
  }
  return LinearizedSystem{std::move(A), std::move(B), std::move(c), std::move(L), x_star, u_star};
}

ReachResult reach_tube(const LinearizedSystem& sys, const Zonotope& X0,
                       const IntervalVector& U_box, double dt, const ReachOptions& opts) {
  const int n = static_cast<int>(sys.A.rows());
  const int m = static_cast<int>(sys.B.cols());
  const int p = opts.expm_order;
  if (sys.A.cols() != n || sys.B.rows() != n || sys.c.size() != n || sys.L.size() != n)
    throw DimensionError("reach: linearized system shape mismatch");
  if (X0.dim() != n || U_box.size() != m) throw DimensionError("reach: initial set shape mismatch");
  if (!(dt > 0.0)) throw DomainError("reach: dt must be positive");
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(sys.L[i].lo()) || !std::isfinite(sys.L[i].hi()))
      throw DomainError("reach: remainder term not finite");

  // Series remainder bound for exp(A t), t in [0, dt].
  double normA = inf_norm_up(sys.A);
  Interval x = Interval(normA) * Interval(dt);
  Interval eps = x / static_cast<double>(p + 2);
  if (!(eps.hi() < 1.0))
    throw ConvergenceError("reach: exp series remainder does not converge; reduce dt or raise order");
  double rem = (pow(x, static_cast<unsigned>(p + 1)) /
                (Interval(factorial(p + 1)) * (Interval(1.0) - eps)))
                   .hi();

  // Shift to y = x - x_star.
  Zonotope Z0{X0.center - sys.x_star, X0.generators};
  IntervalVector hullY = interval_hull(Z0);
  double Ymax = max_mag(hullY);

  std::vector<Eigen::MatrixXd> Apow(static_cast<size_t>(p) + 1);
  Apow[0] = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i <= p; ++i) Apow[static_cast<size_t>(i)] = Apow[static_cast<size_t>(i - 1)] * sys.A;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i <= p; ++i) M += Apow[static_cast<size_t>(i)] * (std::pow(dt, i) / factorial(i));

  // Constant-per-trajectory forcing set W = B(U - u_star) + c + L.
  IntervalVector W = mul(sys.B, U_box - sys.u_star) + IntervalVector::point(sys.c) + sys.L;
  double Wmax = max_mag(W);

  // Forcing integral over the full step and over all partial intervals.
  IntervalVector Vend(n), Vtube(n);
  Interval s_end(dt);
  Interval s_all(0.0, dt);
  for (int i = 0; i <= p; ++i) {
    IntervalVector AiW = mul(Apow[static_cast<size_t>(i)], W);
    Vend = Vend + scale(AiW, pow(s_end, static_cast<unsigned>(i + 1)) / factorial(i + 1));
    Vtube = Vtube + scale(AiW, pow(s_all, static_cast<unsigned>(i + 1)) / factorial(i + 1));
  }
  double e_forcing = (Interval(rem) * Interval(dt) * Interval(Wmax)).hi();
  Vend = Vend + symmetric_box(n, e_forcing);
  Vtube = Vtube + symmetric_box(n, e_forcing);

  // Homogeneous part: truncated exponential image plus series remainder box.
  double e_hom = (Interval(rem) * Interval(Ymax)).hi();
  Zonotope hom_end = linear_map(M, Z0);
  Zonotope Ebox = Zonotope::from_box(symmetric_box(n, e_hom));

  // Curvature of exp(A s) y0 relative to the chord between y0 and exp(A dt) y0.
  IntervalVector Fbox(n);
  for (int i = 2; i <= p; ++i) {
    double di = static_cast<double>(i);
    double beta = std::pow(di, -di / (di - 1.0)) - std::pow(di, -1.0 / (di - 1.0));
    beta = rnd::widen_down(rnd::widen_down(beta));
    Interval coeff = Interval(beta, 0.0) * pow(Interval(dt), static_cast<unsigned>(i)) /
                     factorial(i);
    Fbox = Fbox + scale(mul(Apow[static_cast<size_t>(i)], hullY), coeff);
  }
  Fbox = Fbox + symmetric_box(n, e_hom);

  Zonotope tube = convex_hull_paired(Z0, hom_end);
  tube = minkowski_sum(tube, Ebox);
  tube = minkowski_sum(tube, Zonotope::from_box(Fbox));
  tube = minkowski_sum(tube, Zonotope::from_box(Vtube));
  Zonotope endpoint = minkowski_sum(minkowski_sum(hom_end, Ebox), Zonotope::from_box(Vend));

  tube = reduce_generators(translate(tube, sys.x_star), opts.max_generators);
  endpoint = reduce_generators(translate(endpoint, sys.x_star), opts.max_generators);
  IntervalVector hull = interval_hull(tube);
  return ReachResult{std::move(tube), std::move(endpoint), hull, hull, 0};
}

ReachResult reach_step(const std::vector<MultiPoly>& f,
                       const std::vector<std::vector<MultiPoly>>& g, const Zonotope& X0,
                       const IntervalVector& U_box, double dt, const ReachOptions& opts) {
  std::vector<MultiPoly> F = stack_field(f, g);
  int n = static_cast<int>(f.size());
  if (X0.dim() != n) throw DimensionError("reach: initial set dimension mismatch");

  IntervalVector hull0 = interval_hull(X0);
  Eigen::VectorXd x_star = hull0.midpoint();
  Eigen::VectorXd u_star = U_box.midpoint();

  // A-priori linearization domain: bloat the initial hull by twice the local
  // drift magnitude over one step.
  IntervalVector joint0 = concat(hull0, U_box);
  IntervalVector seed(n);
  for (int i = 0; i < n; ++i) {
    double fm = F[static_cast<size_t>(i)].eval_box(joint0).mag();
    double r = 2.0 * dt * fm + 1e-9;
    seed[i] = Interval(rnd::sub_dir(hull0[i].lo(), r, false), rnd::add_dir(hull0[i].hi(), r, true));
  }

  for (int round = 1; round <= opts.max_fixpoint_rounds; ++round) {
    LinearizedSystem sys = linearize(f, g, x_star, u_star, seed, U_box);
    ReachResult rr = reach_tube(sys, X0, U_box, dt, opts);
    if (seed.contains(rr.hull)) {
      rr.domain = seed;
      rr.fixpoint_rounds = round;
      return rr;
    }
    IntervalVector grown(n);
    for (int i = 0; i < n; ++i) {
      double c = seed[i].midpoint();
      double r = 2.0 * seed[i].radius();
      Interval doubled(rnd::sub_dir(c, r, false), rnd::add_dir(c, r, true));
      grown[i] = hull(doubled, rr.hull[i]);
    }
    seed = grown;
  }
  throw ConvergenceError("reach: linearization domain did not stabilize; reduce dt");
}

}  // namespace sdcbf
