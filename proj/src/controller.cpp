#include "sdcbf/controller.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "sdcbf/errors.hpp"

namespace sdcbf {

namespace {

std::vector<MultiPoly> g_column(const ControlAffineSystem& sys, int j) {
  std::vector<MultiPoly> col;
  col.reserve(sys.g.size());
  for (const auto& row : sys.g) col.push_back(row.at(static_cast<size_t>(j)));
  return col;
}

void check_system(const MultiPoly& h, const ControlAffineSystem& sys) {
  const auto& space = *h.space();
  const size_t n = static_cast<size_t>(space.state_dim());
  const size_t m = static_cast<size_t>(space.input_dim());
  if (h.depends_on_inputs()) throw DomainError("controller: barrier must be state-only");
  if (sys.f.size() != n) throw DimensionError("controller: drift length mismatch");
  if (sys.g.size() != n) throw DimensionError("controller: gain row count mismatch");
  for (const auto& fi : sys.f) {
    if (*fi.space() != space) throw DimensionError("controller: drift space mismatch");
    if (fi.depends_on_inputs()) throw DomainError("controller: drift depends on the input");
  }
  for (const auto& row : sys.g) {
    if (row.size() != m) throw DimensionError("controller: gain column count mismatch");
    for (const auto& gij : row) {
      if (*gij.space() != space) throw DimensionError("controller: gain space mismatch");
      if (gij.depends_on_inputs()) throw DomainError("controller: gain depends on the input");
    }
  }
}

}  // namespace

int relative_degree(const MultiPoly& h, const ControlAffineSystem& sys,
                    const std::vector<Eigen::VectorXd>& x_probe) {
  check_system(h, sys);
  if (x_probe.empty()) throw DomainError("controller: empty probe set");
  const auto& space = *h.space();
  const int n = space.state_dim();
  const int m = space.input_dim();

  MultiPoly lfk = h;  // L_f^{r-1} h as r advances
  for (int r = 1; r <= n; ++r) {
    std::vector<MultiPoly> lg;
    bool symbolic_hit = false;
    for (int j = 0; j < m; ++j) {
      lg.push_back(lie_derivative(lfk, g_column(sys, j)));
      if (!lg.back().is_zero()) symbolic_hit = true;
    }
    if (symbolic_hit) {
      double largest = 0.0;
      for (const auto& x : x_probe) {
        if (x.size() != n) throw DimensionError("controller: probe dimension mismatch");
        Eigen::VectorXd z(n + m);
        z << x, Eigen::VectorXd::Zero(m);
        for (const auto& p : lg) largest = std::max(largest, std::abs(p.eval(z)));
      }
      if (largest <= 1e-9)
        throw RelativeDegreeError(
            "controller: input coefficient vanishes at every probe point");
      return r;
    }
    lfk = lie_derivative(lfk, sys.f);
  }
  throw RelativeDegreeError("controller: input never appears within n derivatives");
}

MultiPoly build_xi(const CBFSpec& spec, const ControlAffineSystem& sys, int r) {
  check_system(spec.h, sys);
  const auto& space = spec.h.space();
  const int n = space->state_dim();
  const int m = space->input_dim();
  if (r < 1 || r > n) throw DomainError("controller: relative degree out of range");

  std::vector<MultiPoly> lf{spec.h};  // lf[k] = L_f^k h
  for (int k = 1; k <= r; ++k) lf.push_back(lie_derivative(lf.back(), sys.f));

  for (int k = 0; k + 1 < r; ++k)
    for (int j = 0; j < m; ++j)
      if (!lie_derivative(lf[static_cast<size_t>(k)], g_column(sys, j)).is_zero())
        throw RelativeDegreeError("controller: input appears before the stated degree");

  MultiPoly xi = lf[static_cast<size_t>(r)];
  for (int j = 0; j < m; ++j)
    xi = xi + lie_derivative(lf[static_cast<size_t>(r - 1)], g_column(sys, j)) *
                  MultiPoly::variable(space, n + j);
  if (r == 1) {
    if (!(spec.gamma > 0.0)) throw DomainError("controller: gamma must be positive");
    xi = xi + spec.gamma * spec.h;
  } else {
    if (spec.a_vec.size() != r)
      throw DomainError("controller: a_vec length must equal the relative degree");
    for (int i = 1; i <= r; ++i) xi = xi + spec.a_vec[i - 1] * lf[static_cast<size_t>(r - i)];
  }
  return xi;
}

std::vector<MultiPoly> build_s_chain(const CBFSpec& spec, const ControlAffineSystem& sys,
                                     int r) {
  check_system(spec.h, sys);
  if (r < 2) throw DomainError("controller: the cascade needs relative degree >= 2");
  if (spec.lambdas.size() != r)
    throw DomainError("controller: lambda count must equal the relative degree");
  for (int i = 0; i < r; ++i)
    if (spec.lambdas[i] < 0.0) throw DomainError("controller: negative lambda");

  std::vector<MultiPoly> chain{spec.h};
  for (int k = 1; k <= r - 1; ++k) {
    MultiPoly s = lie_derivative(chain.back(), sys.f) + spec.lambdas[k - 1] * chain.back();
    if (s.depends_on_inputs())
      throw RelativeDegreeError("controller: cascade entry depends on the input");
    chain.push_back(std::move(s));
  }
  return chain;
}

Eigen::VectorXd a_from_lambdas(const Eigen::VectorXd& lambdas) {
  const int r = static_cast<int>(lambdas.size());
  if (r < 1) throw DomainError("controller: empty lambda vector");
  std::vector<double> c{1.0};  // descending powers, leading first
  for (int i = 0; i < r; ++i) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] += lambdas[i] * c[k];
    }
    c = std::move(next);
  }
  Eigen::VectorXd a(r);
  for (int i = 0; i < r; ++i) a[i] = c[static_cast<size_t>(i) + 1];
  return a;
}

Eigen::VectorXd lambdas_from_a(const Eigen::VectorXd& a_vec) {
  const int r = static_cast<int>(a_vec.size());
  if (r < 1) throw DomainError("controller: empty coefficient vector");
  Eigen::VectorXd lambdas(r);
  if (r == 1) {
    lambdas[0] = a_vec[0];
  } else {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(r, r);
    for (int i = 1; i < r; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < r; ++i) comp(i, r - 1) = -a_vec[r - 1 - i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    if (es.info() != Eigen::Success)
      throw ConvergenceError("controller: eigenvalue iteration failed");
    for (int i = 0; i < r; ++i) lambdas[i] = -es.eigenvalues()[i].real();
  }
  std::sort(lambdas.data(), lambdas.data() + r);
  for (int i = 0; i < r; ++i)
    if (!(lambdas[i] > 0.0))
      throw DomainError("controller: stability polynomial has a nonnegative real-part root");
  Eigen::VectorXd back = a_from_lambdas(lambdas);
  for (int i = 0; i < r; ++i)
    if (std::abs(back[i] - a_vec[i]) > 1e-9 * (1.0 + std::abs(a_vec[i])))
      throw DomainError("controller: roots are not all real (re-expansion mismatch)");
  return lambdas;
}

IntervalVector shrink_input_box(const IntervalVector& U_box, double eps_u) {
  if (eps_u < 0.0) throw DomainError("controller: negative eps_u");
  if (U_box.size() == 0) throw DimensionError("controller: empty input box");
  if (eps_u == 0.0) return U_box;
  IntervalVector shrunk(U_box.size());
  for (int j = 0; j < U_box.size(); ++j) {
    double lo = rnd::add_dir(U_box[j].lo(), eps_u, true);
    double hi = rnd::sub_dir(U_box[j].hi(), eps_u, false);
    if (lo > hi) throw InfeasibleInputSet("controller: input box empty after shrinking");
    shrunk[j] = Interval(lo, hi);
  }
  return shrunk;
}

LinearConstraint make_constraint(const MultiPoly& xi, const Eigen::VectorXd& x_anchor,
                                 double phi) {
  const auto& space = *xi.space();
  const int n = space.state_dim();
  const int m = space.input_dim();
  if (x_anchor.size() != n) throw DimensionError("controller: anchor dimension mismatch");
  for (const auto& [mono, coeff] : xi.terms()) {
    (void)coeff;
    uint32_t u_degree = 0;
    for (int j = n; j < n + m; ++j) u_degree += mono[static_cast<size_t>(j)];
    if (u_degree > 1) throw DomainError("controller: xi is not affine in the input");
  }
  Eigen::VectorXd z(n + m);
  z << x_anchor, Eigen::VectorXd::Zero(m);
  LinearConstraint c;
  c.row.resize(m);
  for (int j = 0; j < m; ++j) c.row[j] = xi.derivative(n + j).eval(z);
  c.rhs = xi.eval(z) + phi;
  return c;
}

}  // namespace sdcbf
