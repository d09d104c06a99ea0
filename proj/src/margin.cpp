#include "sdcbf/margin.hpp"

#include <chrono>
#include <cmath>
#include <queue>
#include <utility>

#include "sdcbf/errors.hpp"

namespace sdcbf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Exact-corner lower bound for an affine polynomial, rounded down.
double affine_lower_bound(const MultiPoly& p, const IntervalVector& box) {
  const int dim = p.space()->dim();
  double acc = p.constant_term();
  Mono mono(static_cast<size_t>(dim), 0);
  for (int v = 0; v < dim; ++v) {
    mono[static_cast<size_t>(v)] = 1;
    double c = p.coeff_of(mono);
    mono[static_cast<size_t>(v)] = 0;
    if (c == 0.0) continue;
    double end = c > 0.0 ? box[v].lo() : box[v].hi();
    acc = rnd::add_dir(acc, rnd::mul_dir(c, end, false), false);
  }
  return acc;
}

// Pin coordinates where p is monotone over the box (preserves the minimum),
// then bound from below with both the natural interval extension and the
// mean-value form; the slope intervals serve double duty. The mean-value
// bound tightens quadratically as boxes shrink, the natural one wins on
// wide boxes; both are sound, so take the max.
double boxed_lower_bound(const MultiPoly& p,
                         const std::vector<std::pair<int, MultiPoly>>& derivs,
                         IntervalVector& box) {
  std::vector<std::pair<int, Interval>> slopes;
  slopes.reserve(derivs.size());
  for (const auto& [v, dp] : derivs) {
    if (box[v].is_degenerate()) continue;
    Interval slope = dp.eval_box(box);
    if (slope.lo() >= 0.0)
      box[v] = Interval(box[v].lo());
    else if (slope.hi() <= 0.0)
      box[v] = Interval(box[v].hi());
    else
      slopes.emplace_back(v, slope);
  }
  double natural = p.eval_box(box).lo();
  Eigen::VectorXd mid = box.midpoint();
  Interval mv = p.eval_box(IntervalVector::point(mid));
  for (const auto& [v, slope] : slopes) mv = mv + slope * (box[v] - Interval(mid[v]));
  return std::max(natural, mv.lo());
}

struct Node {
  double lb;
  long seq;  // insertion order, breaks lb ties deterministically
  IntervalVector box;
};

struct NodeWorse {
  bool operator()(const Node& a, const Node& b) const {
    if (a.lb != b.lb) return a.lb > b.lb;
    return a.seq > b.seq;
  }
};

}  // namespace

MultiPoly delta_xi(const MultiPoly& xi, const Eigen::VectorXd& x_anchor) {
  const auto& space = *xi.space();
  if (x_anchor.size() != space.state_dim())
    throw DimensionError("margin: anchor dimension mismatch");
  std::vector<std::pair<int, double>> fixed;
  fixed.reserve(static_cast<size_t>(space.state_dim()));
  for (int i = 0; i < space.state_dim(); ++i) fixed.emplace_back(i, x_anchor[i]);
  return xi - xi.substituted(fixed);
}

IntervalVector assemble_zk(const ReachResult& reach, const IntervalVector& U_box) {
  if (reach.hull.size() == 0 || U_box.size() == 0)
    throw DimensionError("margin: empty factor in the joint box");
  return concat(reach.hull, U_box);
}

double lower_bound_poly(const MultiPoly& p, const IntervalVector& box, double tol,
                        long node_budget, PopStats* stats, double wall_budget_s) {
  const auto t0 = Clock::now();
  if (stats) *stats = PopStats{};
  const int dim = p.space()->dim();
  if (box.size() != dim) throw DimensionError("margin: box dimension mismatch");
  for (int i = 0; i < dim; ++i)
    if (!std::isfinite(box[i].lo()) || !std::isfinite(box[i].hi()))
      throw DomainError("margin: unbounded box");
  if (tol <= 0.0) throw DomainError("margin: tolerance must be positive");
  if (node_budget < 1) throw DomainError("margin: node budget must be positive");

  if (p.degree() <= 0) return p.constant_term();
  if (p.is_affine()) {
    double lb = affine_lower_bound(p, box);
    if (stats) stats->wall_s = seconds_since(t0);
    return lb;
  }

  std::vector<std::pair<int, MultiPoly>> derivs;
  for (int v = 0; v < dim; ++v)
    if (p.depends_on(v)) derivs.emplace_back(v, p.derivative(v));

  double upper = std::numeric_limits<double>::infinity();
  double best_final = std::numeric_limits<double>::infinity();
  long seq = 0;
  std::priority_queue<Node, std::vector<Node>, NodeWorse> open;

  auto push = [&](IntervalVector b) {
    double lb = boxed_lower_bound(p, derivs, b);
    double at_mid = p.eval_box(IntervalVector::point(b.midpoint())).hi();
    upper = std::min(upper, at_mid);
    open.push(Node{lb, seq++, std::move(b)});
  };

  push(box);
  long nodes = 0;
  double result;
  while (true) {
    if (open.empty()) {
      result = best_final;
      break;
    }
    double bound = std::min(open.top().lb, best_final);
    if (upper - bound <= tol) {
      result = bound;
      break;
    }
    if (nodes >= node_budget ||
        (wall_budget_s > 0.0 && seconds_since(t0) > wall_budget_s)) {
      if (stats) stats->budget_hit = true;
      result = bound;
      break;
    }
    Node node = open.top();
    open.pop();
    ++nodes;
    if (node.lb > upper) continue;  // cannot contain the minimizer

    int split = -1;
    double widest = 0.0;
    for (const auto& [v, dp] : derivs) {
      (void)dp;
      double w = node.box[v].width();
      if (w > widest) {
        widest = w;
        split = v;
      }
    }
    double mid = split >= 0 ? node.box[split].midpoint() : 0.0;
    if (split < 0 || mid <= node.box[split].lo() || mid >= node.box[split].hi()) {
      best_final = std::min(best_final, node.lb);  // box too thin to split
      continue;
    }
    IntervalVector left = node.box;
    IntervalVector right = node.box;
    left[split] = Interval(node.box[split].lo(), mid);
    right[split] = Interval(mid, node.box[split].hi());
    push(std::move(left));
    push(std::move(right));
  }

  if (stats) {
    stats->nodes = nodes;
    stats->wall_s = seconds_since(t0);
  }
  return result;
}

MarginResult compute_margin(const MarginRequest& req, const ReachResult& reach,
                            const IntervalVector& U_box, const MarginOptions& opts) {
  const auto t0 = Clock::now();
  const auto& space = *req.xi.space();
  if (req.x_anchor.size() != space.state_dim())
    throw DimensionError("margin: anchor dimension mismatch");
  if (req.u_center.size() != space.input_dim() || U_box.size() != space.input_dim())
    throw DimensionError("margin: input dimension mismatch");
  for (int j = 0; j < U_box.size(); ++j)
    if (std::abs(req.u_center[j] - U_box[j].midpoint()) > 1e-9 * (1.0 + U_box[j].mag()))
      throw DomainError("margin: u_center is not the center of the input box");

  IntervalVector zk = assemble_zk(reach, U_box);
  Eigen::VectorXd z_star(space.dim());
  z_star << req.x_anchor, req.u_center;
  if (!zk.contains(z_star))
    throw DomainError("margin: expansion point outside the joint box");

  MultiPoly dxi = delta_xi(req.xi, req.x_anchor);
  TaylorModel tm = build_taylor_model(dxi, z_star, zk, req.order);
  PopStats stats;
  double poly_lo = lower_bound_poly(tm.poly, tm.centered_domain(), opts.tol, opts.node_budget,
                                    &stats, opts.wall_budget_s);
  double remainder_lo = tm.remainder.lo();
  return MarginResult{remainder_lo + poly_lo, remainder_lo, poly_lo,   std::move(zk),
                      stats.nodes,            seconds_since(t0), std::move(tm)};
}

bool check_initial_condition(const std::vector<MultiPoly>& s_chain,
                             const Eigen::VectorXd& x0_hat, double eps_x,
                             const MarginOptions& opts) {
  if (s_chain.empty()) throw DomainError("margin: empty s-chain");
  if (eps_x < 0.0) throw DomainError("margin: negative eps_x");
  const auto& space = *s_chain.front().space();
  if (x0_hat.size() != space.state_dim())
    throw DimensionError("margin: initial state dimension mismatch");
  IntervalVector ball = IntervalVector::from_center_radius(x0_hat, eps_x);
  IntervalVector box(space.dim());
  for (int i = 0; i < space.state_dim(); ++i) box[i] = ball[i];
  for (int j = space.state_dim(); j < space.dim(); ++j) box[j] = Interval(0.0);
  for (const auto& s : s_chain) {
    if (s.depends_on_inputs())
      throw RelativeDegreeError("margin: s-chain entry depends on the input");
    if (lower_bound_poly(s, box, opts.tol, opts.node_budget, nullptr, opts.wall_budget_s) < 0.0)
      return false;
  }
  return true;
}

}  // namespace sdcbf
