#include "sdcbf/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <json.hpp>
#include <optional>
#include <ostream>

#include "sdcbf/errors.hpp"

namespace sdcbf {

namespace {

// Bit-reproducible uniform in [0, 1): the top 53 bits of the engine output.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform direction-and-radius draw in the closed unit ball; the accepted
// sequence depends only on the engine stream, never on the radius it is
// later scaled by.
Eigen::VectorXd unit_ball(int dim, std::mt19937_64& rng) {
  Eigen::VectorXd v(dim);
  while (true) {
    for (int i = 0; i < dim; ++i) v[i] = 2.0 * next_unit(rng) - 1.0;
    if (v.squaredNorm() <= 1.0) return v;
  }
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double pos = q * (static_cast<double>(v.size()) - 1.0);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

NoiseMode noise_mode_from_string(const std::string& s) {
  if (s == "none") return NoiseMode::none;
  if (s == "uniform_ball") return NoiseMode::uniform_ball;
  if (s == "adversarial") return NoiseMode::adversarial;
  throw DomainError("unknown noise mode '" + s + "'");
}

ControllerKind controller_from_string(const std::string& s) {
  if (s == "naive") return ControllerKind::naive;
  if (s == "sdcbf") return ControllerKind::sdcbf;
  if (s == "usdcbf") return ControllerKind::usdcbf;
  throw DomainError("unknown controller '" + s + "'");
}

std::string to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::none: return "none";
    case NoiseMode::uniform_ball: return "uniform_ball";
    default: return "adversarial";
  }
}

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::naive: return "naive";
    case ControllerKind::sdcbf: return "sdcbf";
    default: return "usdcbf";
  }
}

std::string to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::ok: return "ok";
    case EpisodeStatus::refused_initial_condition: return "refused_initial_condition";
    case EpisodeStatus::infeasible: return "infeasible";
    default: return "diverged";
  }
}

Eigen::VectorXd sample_measurement_noise(const NoiseModel& noise,
                                         const Eigen::VectorXd& grad_h,
                                         std::mt19937_64& rng) {
  const int n = static_cast<int>(grad_h.size());
  if (n < 1) throw DimensionError("measurement noise: empty gradient");
  if (!(noise.eps_x >= 0.0)) throw DomainError("measurement noise: eps_x must be >= 0");
  switch (noise.mode) {
    case NoiseMode::none:
      return Eigen::VectorXd::Zero(n);
    case NoiseMode::uniform_ball:
      return noise.eps_x * unit_ball(n, rng);
    default: {
      double norm = grad_h.norm();
      if (norm == 0.0) return noise.eps_x * unit_ball(n, rng);
      return (-noise.eps_x / norm) * grad_h;
    }
  }
}

Eigen::VectorXd sample_actuation_noise(const NoiseModel& noise, int input_dim,
                                       std::mt19937_64& rng) {
  if (input_dim < 1) throw DimensionError("actuation noise: input_dim must be >= 1");
  if (!(noise.eps_u >= 0.0)) throw DomainError("actuation noise: eps_u must be >= 0");
  if (noise.mode == NoiseMode::none) return Eigen::VectorXd::Zero(input_dim);
  return noise.eps_u * unit_ball(input_dim, rng);
}

namespace {

Eigen::VectorXd dynamics(const ControlAffineSystem& sys, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(u.size());
  Eigen::VectorXd z(n + m);
  z << x, u;
  Eigen::VectorXd dx(n);
  for (int i = 0; i < n; ++i) {
    double v = sys.f[static_cast<size_t>(i)].eval(z);
    for (int j = 0; j < m; ++j)
      v += sys.g[static_cast<size_t>(i)][static_cast<size_t>(j)].eval(z) * u[j];
    dx[i] = v;
  }
  return dx;
}

}  // namespace

std::vector<Eigen::VectorXd> integrate_step(const ControlAffineSystem& sys,
                                            const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& u, double dt,
                                            int substeps) {
  const int n = static_cast<int>(sys.f.size());
  if (n < 1 || x.size() != n) throw DimensionError("integrate_step: state dimension mismatch");
  if (sys.g.size() != static_cast<size_t>(n))
    throw DimensionError("integrate_step: g row count mismatch");
  const int m = static_cast<int>(sys.g[0].size());
  if (u.size() != m) throw DimensionError("integrate_step: input dimension mismatch");
  if (substeps < 1) throw DomainError("integrate_step: substeps must be >= 1");
  if (!(dt > 0.0)) throw DomainError("integrate_step: dt must be positive");

  const double h = dt / substeps;
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(substeps));
  Eigen::VectorXd cur = x;
  for (int s = 0; s < substeps; ++s) {
    Eigen::VectorXd k1 = dynamics(sys, cur, u);
    Eigen::VectorXd k2 = dynamics(sys, cur + 0.5 * h * k1, u);
    Eigen::VectorXd k3 = dynamics(sys, cur + 0.5 * h * k2, u);
    Eigen::VectorXd k4 = dynamics(sys, cur + h * k3, u);
    cur = cur + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!cur.allFinite() || cur.lpNorm<Eigen::Infinity>() > 1e9)
      throw DivergenceError("integrate_step: state diverged");
    out.push_back(cur);
  }
  return out;
}

namespace {

Eigen::VectorXd eval_barriers(const CompiledScenario& sc, const Eigen::VectorXd& x) {
  const int n = sc.space->state_dim();
  const int m = sc.space->input_dim();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n + m);
  z.head(n) = x;
  Eigen::VectorXd hv(static_cast<Eigen::Index>(sc.barriers.size()));
  for (size_t i = 0; i < sc.barriers.size(); ++i)
    hv[static_cast<Eigen::Index>(i)] = sc.barriers[i].h.eval(z);
  return hv;
}

Eigen::VectorXd clamp_to_box(const Eigen::VectorXd& u, const IntervalVector& box) {
  Eigen::VectorXd out = u;
  for (int j = 0; j < u.size(); ++j)
    out[j] = std::min(std::max(out[j], box[j].lo()), box[j].hi());
  return out;
}

}  // namespace

SimLog run_episode(const CompiledScenario& sc, ControllerKind kind,
                   const NoiseModel& noise, const SimOptions& opts) {
  const int n = sc.space->state_dim();
  const int m = sc.space->input_dim();
  const int nb = static_cast<int>(sc.barriers.size());
  if (opts.substeps < 1) throw DomainError("run_episode: substeps must be >= 1");
  if (!(noise.eps_x >= 0.0) || !(noise.eps_u >= 0.0))
    throw DomainError("run_episode: noise bounds must be >= 0");

  const double dt = sc.config.dt;
  const int steps = static_cast<int>(std::llround(sc.config.horizon / dt));
  if (steps < 1) throw DomainError("run_episode: horizon shorter than one step");

  SimLog log;
  log.controller = kind;
  log.noise = noise;
  log.dt = dt;
  log.horizon = sc.config.horizon;
  log.substeps = opts.substeps;
  log.min_h = eval_barriers(sc, sc.x0);
  log.min_h_overall = log.min_h.minCoeff();

  auto track = [&log](double t, const Eigen::VectorXd& hv) {
    for (int i = 0; i < hv.size(); ++i)
      if (hv[i] < log.min_h[i]) log.min_h[i] = hv[i];
    double lo = hv.minCoeff();
    if (lo < log.min_h_overall) log.min_h_overall = lo;
    if (lo < 0.0 && log.first_violation_time < 0.0) log.first_violation_time = t;
  };
  track(0.0, log.min_h);
  log.fine.push_back({0.0, sc.x0, Eigen::VectorXd::Zero(m), log.min_h});

  const MarginOptions mopts = sc.margin_options();
  const ReachOptions ropts;

  // Margin-aware controllers refuse episodes whose s-chain can go negative
  // over the measurement ball around the initial state.
  if (kind != ControllerKind::naive) {
    const double eps_chk = (kind == ControllerKind::usdcbf) ? noise.eps_x : 0.0;
    for (int bi = 0; bi < nb; ++bi) {
      if (!check_initial_condition(sc.barriers[static_cast<size_t>(bi)].s_chain, sc.x0,
                                   eps_chk, mopts)) {
        log.status = EpisodeStatus::refused_initial_condition;
        log.status_detail = "barrier " + std::to_string(bi + 1) +
                            ": initial chain not nonnegative over the eps_x ball";
        log.violation = log.min_h_overall < 0.0;
        return log;
      }
    }
  }

  std::mt19937_64 meas_rng(noise.seed);
  std::mt19937_64 act_rng(noise.seed ^ 0x9E3779B97F4A7C15ull);

  const IntervalVector& U_full = sc.sys.U_box;
  const IntervalVector U_qp = (kind == ControllerKind::usdcbf)
                                  ? shrink_input_box(U_full, noise.eps_u)
                                  : U_full;
  const Eigen::VectorXd u_center = U_full.midpoint();

  // Gradient polynomials, only needed to aim adversarial measurement noise.
  std::vector<std::vector<MultiPoly>> grads;
  if (noise.mode == NoiseMode::adversarial) {
    for (const auto& b : sc.barriers) {
      std::vector<MultiPoly> gi;
      for (int d = 0; d < n; ++d) gi.push_back(b.h.derivative(d));
      grads.push_back(std::move(gi));
    }
  }

  Eigen::VectorXd x = sc.x0;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    StepLog st;
    st.k = k;
    st.t = t;
    st.x_true = x;

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    if (noise.mode == NoiseMode::adversarial) {
      Eigen::VectorXd hv = eval_barriers(sc, x);
      int ci = 0;
      hv.minCoeff(&ci);
      Eigen::VectorXd z = Eigen::VectorXd::Zero(n + m);
      z.head(n) = x;
      for (int d = 0; d < n; ++d)
        grad[d] = grads[static_cast<size_t>(ci)][static_cast<size_t>(d)].eval(z);
    }
    st.d_meas = sample_measurement_noise(noise, grad, meas_rng);
    st.x_meas = x + st.d_meas;
    st.u_nom = sc.nominal(t, st.x_meas);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<LinearConstraint> cons;
    cons.reserve(static_cast<size_t>(nb));
    st.phi = Eigen::VectorXd::Zero(nb);
    std::optional<Zonotope> X0;
    std::optional<ReachResult> reach;
    std::vector<MarginResult> margins;
    long pop_nodes = 0;

    if (kind == ControllerKind::naive) {
      for (const auto& b : sc.barriers) cons.push_back(make_constraint(b.xi, st.x_meas, 0.0));
    } else {
      const double eps_used = (kind == ControllerKind::usdcbf) ? noise.eps_x : 0.0;
      X0 = (eps_used > 0.0)
               ? Zonotope::from_box(IntervalVector::from_center_radius(st.x_meas, eps_used))
               : Zonotope::point(st.x_meas);
      reach = reach_step(sc.sys.f, sc.sys.g, *X0, U_full, dt, ropts);
      for (int bi = 0; bi < nb; ++bi) {
        const CompiledBarrier& b = sc.barriers[static_cast<size_t>(bi)];
        MarginRequest req{b.xi, st.x_meas, u_center, dt, eps_used, mopts.order};
        MarginResult mr = compute_margin(req, *reach, U_full, mopts);
        st.phi[bi] = mr.phi;
        pop_nodes += mr.nodes;
        cons.push_back(make_constraint(b.xi, st.x_meas, mr.phi));
        if (opts.audit) margins.push_back(std::move(mr));
      }
    }

    QPResult qp = solve_safety_qp(st.u_nom, cons, U_qp);
    st.compute_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    st.pop_nodes = pop_nodes;
    st.qp_feasible = qp.feasible;
    st.kkt_residual = qp.kkt_residual;
    st.u_cmd = qp.u_star;
    st.h_sample = eval_barriers(sc, x);

    if (!qp.feasible) {
      ++log.qp_infeasible_steps;
      if (kind == ControllerKind::naive) {
        // the unfiltered baseline falls back on the nominal law
        st.u_cmd = clamp_to_box(st.u_nom, U_full);
      } else if (opts.halt_on_infeasible) {
        st.u_act = qp.u_star;
        st.d_act = Eigen::VectorXd::Zero(m);
        st.h_min_fine = st.h_sample.minCoeff();
        log.steps.push_back(std::move(st));
        log.status = EpisodeStatus::infeasible;
        log.status_detail = "QP infeasible at step " + std::to_string(k);
        break;
      }
      // otherwise keep qp.u_star, the least-violation point
    }

    st.d_act = sample_actuation_noise(noise, m, act_rng);
    st.u_act = clamp_to_box(st.u_cmd + st.d_act, U_full);

    std::vector<Eigen::VectorXd> fine;
    try {
      fine = integrate_step(sc.sys, x, st.u_act, dt, opts.substeps);
    } catch (const DivergenceError&) {
      st.h_min_fine = st.h_sample.minCoeff();
      log.steps.push_back(std::move(st));
      log.status = EpisodeStatus::diverged;
      log.status_detail = "state diverged during step " + std::to_string(k);
      break;
    }

    double h_min_fine = st.h_sample.minCoeff();
    for (size_t s = 0; s < fine.size(); ++s) {
      const double ts = t + (static_cast<double>(s) + 1.0) * dt / opts.substeps;
      Eigen::VectorXd hv = eval_barriers(sc, fine[s]);
      track(ts, hv);
      h_min_fine = std::min(h_min_fine, hv.minCoeff());
      log.fine.push_back({ts, fine[s], st.u_act, std::move(hv)});
    }
    st.h_min_fine = h_min_fine;

    if (opts.audit && reach && k % std::max(1, opts.audit->stride) == 0) {
      AuditStep as(*X0, *reach);
      as.k = k;
      as.dt = dt;
      as.x_meas = st.x_meas;
      as.u_center = u_center;
      as.margins = std::move(margins);
      as.u_act = st.u_act;
      as.fine_states.push_back(x);
      for (const auto& xs : fine) as.fine_states.push_back(xs);
      opts.audit->steps.push_back(std::move(as));
    }

    x = fine.back();
    log.steps.push_back(std::move(st));
  }

  log.violation = log.min_h_overall < 0.0;
  return log;
}

SimLog run_episode(const ScenarioConfig& cfg, ControllerKind kind, const NoiseModel& noise,
                   const SimOptions& opts) {
  return run_episode(compile_scenario(cfg), kind, noise, opts);
}

void write_trajectory_csv(const SimLog& log, std::ostream& out) {
  if (log.fine.empty()) return;
  const Eigen::Index n = log.fine.front().x.size();
  const Eigen::Index m = log.fine.front().u.size();
  const Eigen::Index nb = log.fine.front().h.size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << (i + 1);
  for (Eigen::Index j = 0; j < m; ++j) out << ",u" << (j + 1);
  for (Eigen::Index b = 0; b < nb; ++b) out << ",h" << (b + 1);
  out << "\r\n";
  for (const auto& p : log.fine) {
    out << fmt_num(p.t);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt_num(p.x[i]);
    for (Eigen::Index j = 0; j < m; ++j) out << "," << fmt_num(p.u[j]);
    for (Eigen::Index b = 0; b < nb; ++b) out << "," << fmt_num(p.h[b]);
    out << "\r\n";
  }
}

void write_steps_csv(const SimLog& log, std::ostream& out) {
  if (log.steps.empty()) return;
  const auto& first = log.steps.front();
  const Eigen::Index n = first.x_true.size();
  const Eigen::Index m = first.u_nom.size();
  const Eigen::Index nb = first.phi.size();
  out << "k,t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << (i + 1);
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_meas" << (i + 1);
  for (Eigen::Index j = 0; j < m; ++j) out << ",u_nom" << (j + 1);
  for (Eigen::Index j = 0; j < m; ++j) out << ",u_cmd" << (j + 1);
  for (Eigen::Index j = 0; j < m; ++j) out << ",u_act" << (j + 1);
  for (Eigen::Index b = 0; b < nb; ++b) out << ",phi" << (b + 1);
  for (Eigen::Index b = 0; b < nb; ++b) out << ",h" << (b + 1);
  out << ",h_min_fine,qp_feasible,kkt_residual,pop_nodes,compute_ms\r\n";
  for (const auto& s : log.steps) {
    out << s.k << "," << fmt_num(s.t);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt_num(s.x_true[i]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt_num(s.x_meas[i]);
    for (Eigen::Index j = 0; j < m; ++j) out << "," << fmt_num(s.u_nom[j]);
    for (Eigen::Index j = 0; j < m; ++j) out << "," << fmt_num(s.u_cmd[j]);
    for (Eigen::Index j = 0; j < m; ++j) out << "," << fmt_num(s.u_act[j]);
    for (Eigen::Index b = 0; b < nb; ++b) out << "," << fmt_num(s.phi[b]);
    for (Eigen::Index b = 0; b < nb; ++b) out << "," << fmt_num(s.h_sample[b]);
    out << "," << fmt_num(s.h_min_fine) << "," << (s.qp_feasible ? 1 : 0) << ","
        << fmt_num(s.kkt_residual) << "," << s.pop_nodes << "," << fmt_num(s.compute_ms)
        << "\r\n";
  }
}

void write_summary_json(const SimLog& log, const CompiledScenario& sc, std::ostream& out) {
  nlohmann::ordered_json j;
  j["scenario"] = sc.config.name;
  j["controller"] = to_string(log.controller);
  j["status"] = to_string(log.status);
  j["status_detail"] = log.status_detail;
  j["seed"] = log.noise.seed;
  j["noise_mode"] = to_string(log.noise.mode);
  j["eps_x"] = log.noise.eps_x;
  j["eps_u"] = log.noise.eps_u;
  j["dt"] = log.dt;
  j["horizon"] = log.horizon;
  j["substeps"] = log.substeps;
  j["steps"] = log.steps.size();
  j["barriers"] = sc.barriers.size();
  j["min_h"] = std::vector<double>(log.min_h.data(), log.min_h.data() + log.min_h.size());
  j["min_h_overall"] = log.min_h_overall;
  j["violation"] = log.violation;
  if (log.first_violation_time >= 0.0)
    j["first_violation_time"] = log.first_violation_time;
  else
    j["first_violation_time"] = nullptr;
  j["qp_infeasible_steps"] = log.qp_infeasible_steps;
  std::vector<double> phi_min;
  if (!log.steps.empty()) {
    phi_min.assign(static_cast<size_t>(log.steps.front().phi.size()),
                   std::numeric_limits<double>::infinity());
    for (const auto& s : log.steps)
      for (Eigen::Index b = 0; b < s.phi.size(); ++b)
        phi_min[static_cast<size_t>(b)] = std::min(phi_min[static_cast<size_t>(b)], s.phi[b]);
  }
  j["phi_min"] = phi_min;
  const Eigen::VectorXd& xf = log.fine.empty() ? sc.x0 : log.fine.back().x;
  j["final_state"] = std::vector<double>(xf.data(), xf.data() + xf.size());
  j["final_time"] = log.fine.empty() ? 0.0 : log.fine.back().t;
  out << j.dump(2) << "\n";
}

void write_timing_json(const SimLog& log, std::ostream& out) {
  std::vector<double> ms;
  ms.reserve(log.steps.size());
  for (const auto& s : log.steps) ms.push_back(s.compute_ms);
  double mean = 0.0, mx = 0.0;
  for (double v : ms) {
    mean += v;
    mx = std::max(mx, v);
  }
  if (!ms.empty()) mean /= static_cast<double>(ms.size());
  nlohmann::ordered_json j;
  j["compute_ms"] = {{"count", ms.size()},
                     {"mean", mean},
                     {"p50", quantile(ms, 0.5)},
                     {"p95", quantile(ms, 0.95)},
                     {"max", mx}};
  out << j.dump(2) << "\n";
}

}  // namespace sdcbf
