#include "sdcbf/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sdcbf/errors.hpp"

namespace sdcbf {

namespace {

struct Row {
  Eigen::VectorXd a;
  double b;
};

double violation(const Row& r, const Eigen::VectorXd& u) { return -(r.a.dot(u) + r.b); }

bool primal_feasible(const std::vector<Row>& rows, const Eigen::VectorXd& u) {
  for (const auto& r : rows)
    if (violation(r, u) > 1e-9 * (1.0 + std::abs(r.b))) return false;
  return true;
}

double max_violation(const std::vector<Row>& rows, const Eigen::VectorXd& u) {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, violation(r, u));
  return worst;
}

Eigen::VectorXd clamp_to_box(Eigen::VectorXd u, const IntervalVector& box) {
  for (int j = 0; j < box.size(); ++j) u[j] = std::clamp(u[j], box[j].lo(), box[j].hi());
  return u;
}

// Flagged fallback: minimize the sum of squared constraint violations over
// the box by projected gradient with a fixed deterministic schedule.
QPResult least_violation_point(const Eigen::VectorXd& u_nom,
                               const std::vector<Row>& user_rows, const IntervalVector& box) {
  double lipschitz = 1.0;
  for (const auto& r : user_rows) lipschitz += r.a.squaredNorm();
  Eigen::VectorXd u = clamp_to_box(u_nom, box);
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(u.size());
    for (const auto& r : user_rows) {
      double v = violation(r, u);
      if (v > 0.0) grad -= v * r.a;
    }
    u = clamp_to_box(u - grad / lipschitz, box);
  }
  QPResult out;
  out.u_star = std::move(u);
  out.kkt_residual = max_violation(user_rows, out.u_star);
  out.feasible = false;
  return out;
}

}  // namespace

QPResult solve_safety_qp(const Eigen::VectorXd& u_nom,
                         const std::vector<LinearConstraint>& constraints,
                         const IntervalVector& U_eff) {
  const int m = U_eff.size();
  if (m == 0) throw DimensionError("qp: empty input box");
  if (u_nom.size() != m) throw DimensionError("qp: nominal input dimension mismatch");
  const int nc = static_cast<int>(constraints.size());

  std::vector<Row> rows;
  rows.reserve(static_cast<size_t>(nc + 2 * m));
  for (const auto& c : constraints) {
    if (c.row.size() != m) throw DimensionError("qp: constraint row dimension mismatch");
    rows.push_back(Row{c.row, c.rhs});
  }
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd lo_row = Eigen::VectorXd::Zero(m);
    lo_row[j] = 1.0;
    rows.push_back(Row{lo_row, -U_eff[j].lo()});
    Eigen::VectorXd hi_row = Eigen::VectorXd::Zero(m);
    hi_row[j] = -1.0;
    rows.push_back(Row{hi_row, U_eff[j].hi()});
  }
  const int total = static_cast<int>(rows.size());

  if (primal_feasible(rows, u_nom)) {
    QPResult out;
    out.u_star = u_nom;  // exact passthrough when already admissible
    out.kkt_residual = max_violation(rows, u_nom);
    out.feasible = true;
    return out;
  }

  // Candidate active sets by size then lexicographic order, so the
  // lowest-index certificate wins deterministically.
  std::vector<int> subset;
  for (int k = 1; k <= m; ++k) {
    subset.assign(static_cast<size_t>(k), 0);
    for (int i = 0; i < k; ++i) subset[static_cast<size_t>(i)] = i;
    while (true) {
      Eigen::MatrixXd A(k, m);
      Eigen::VectorXd b(k);
      for (int i = 0; i < k; ++i) {
        A.row(i) = rows[static_cast<size_t>(subset[static_cast<size_t>(i)])].a;
        b[i] = rows[static_cast<size_t>(subset[static_cast<size_t>(i)])].b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A * A.transpose());
      if (lu.isInvertible()) {
        Eigen::VectorXd mu = lu.solve(-(A * u_nom + b));
        double mu_scale = 1.0 + mu.cwiseAbs().maxCoeff();
        if (mu.minCoeff() >= -1e-9 * mu_scale) {
          Eigen::VectorXd u = u_nom + A.transpose() * mu;
          if (primal_feasible(rows, u)) {
            double stationarity = (u - u_nom - A.transpose() * mu).lpNorm<Eigen::Infinity>();
            double comp = 0.0;
            for (int i = 0; i < k; ++i)
              comp = std::max(comp, std::abs(mu[i] * (A.row(i).dot(u) + b[i])));
            QPResult out;
            out.u_star = std::move(u);
            out.active_set.assign(subset.begin(), subset.end());
            out.kkt_residual = std::max({stationarity, comp, max_violation(rows, out.u_star),
                                         std::max(0.0, -mu.minCoeff())});
            out.feasible = true;
            return out;
          }
        }
      }
      // next k-combination of {0..total-1}
      int pos = k - 1;
      while (pos >= 0 && subset[static_cast<size_t>(pos)] == total - k + pos) --pos;
      if (pos < 0) break;
      ++subset[static_cast<size_t>(pos)];
      for (int i = pos + 1; i < k; ++i)
        subset[static_cast<size_t>(i)] = subset[static_cast<size_t>(i - 1)] + 1;
    }
  }

  std::vector<Row> user_rows(rows.begin(), rows.begin() + nc);
  return least_violation_point(u_nom, user_rows, U_eff);
}

}  // namespace sdcbf
