#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "sdcbf/margin.hpp"
#include "sdcbf/qp.hpp"
#include "sdcbf/reach.hpp"
#include "sdcbf/scenario.hpp"

namespace sdcbf {

enum class NoiseMode { none, uniform_ball, adversarial };
enum class ControllerKind { naive, sdcbf, usdcbf };
enum class EpisodeStatus { ok, refused_initial_condition, infeasible, diverged };

NoiseMode noise_mode_from_string(const std::string& s);
ControllerKind controller_from_string(const std::string& s);
std::string to_string(NoiseMode m);
std::string to_string(ControllerKind k);
std::string to_string(EpisodeStatus s);

struct NoiseModel {
  double eps_x = 0.0;
  double eps_u = 0.0;
  NoiseMode mode = NoiseMode::none;
  std::uint64_t seed = 0;
};

// Measurement disturbance with ||d|| <= eps_x. uniform_ball draws uniformly
// in the 2-norm ball via rejection sampling whose accepted directions do not
// depend on eps_x (so sweeps over eps_x see the same noise realization,
// scaled). adversarial pushes the estimate along -grad_h; a zero gradient
// falls back to a uniform-ball draw for that step.
Eigen::VectorXd sample_measurement_noise(const NoiseModel& noise,
                                         const Eigen::VectorXd& grad_h,
                                         std::mt19937_64& rng);

// Actuation disturbance with ||e|| <= eps_u; uniform in the ball for every
// mode except none (the adversarial mode only shapes the measurement).
Eigen::VectorXd sample_actuation_noise(const NoiseModel& noise, int input_dim,
                                       std::mt19937_64& rng);

// Classical 4th-order integration with frozen input, repeated substeps times.
// Returns the substeps intermediate states (x(dt/substeps), ..., x(dt)).
// Throws DivergenceError when the state leaves the finite range.
std::vector<Eigen::VectorXd> integrate_step(const ControlAffineSystem& sys,
                                            const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& u, double dt,
                                            int substeps);

struct StepLog {
  int k = 0;
  double t = 0.0;
  Eigen::VectorXd x_true;   // state at the sampling instant
  Eigen::VectorXd x_meas;   // measured state fed to the controller
  Eigen::VectorXd u_nom;    // nominal input (clamped to the input box)
  Eigen::VectorXd u_cmd;    // filter output
  Eigen::VectorXd u_act;    // applied input after actuation noise
  Eigen::VectorXd d_meas;   // measurement disturbance
  Eigen::VectorXd d_act;    // actuation disturbance
  Eigen::VectorXd phi;      // margin per barrier (zeros for naive)
  Eigen::VectorXd h_sample; // h_i at the sampling instant, true state
  double h_min_fine = 0.0;  // min over barriers and substeps of this interval
  bool qp_feasible = true;
  double kkt_residual = 0.0;
  long pop_nodes = 0;       // branch and bound nodes across barriers
  double compute_ms = 0.0;  // reach + margin + QP wall time
};

struct FinePoint {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;  // held input
  Eigen::VectorXd h;  // all barrier values
};

struct SimLog {
  EpisodeStatus status = EpisodeStatus::ok;
  std::string status_detail;
  ControllerKind controller = ControllerKind::naive;
  NoiseModel noise;
  double dt = 0.0;
  double horizon = 0.0;
  int substeps = 0;
  std::vector<StepLog> steps;
  std::vector<FinePoint> fine;   // includes the t = 0 state
  Eigen::VectorXd min_h;         // per barrier over the fine grid
  double min_h_overall = 0.0;
  bool violation = false;
  double first_violation_time = -1.0;  // -1 when no violation
  int qp_infeasible_steps = 0;
};

// Per-step evidence retained for the soundness audits: the reach tube, every
// margin result (with its Taylor model), and the true inter-sample states.
struct AuditStep {
  int k = 0;
  double dt = 0.0;
  Eigen::VectorXd x_meas;
  Eigen::VectorXd u_center;
  Zonotope X0;
  ReachResult reach;
  std::vector<MarginResult> margins;
  std::vector<Eigen::VectorXd> fine_states;  // x(t_k) plus the substep states
  Eigen::VectorXd u_act;

  AuditStep(Zonotope x0, ReachResult r) : X0(std::move(x0)), reach(std::move(r)) {}
};

struct AuditTrace {
  int stride = 1;  // record every stride-th step
  std::vector<AuditStep> steps;
};

struct SimOptions {
  int substeps = 100;
  AuditTrace* audit = nullptr;
  // Contract behavior: a filtered controller whose admissible set comes up
  // empty stops the episode (status infeasible). Setting this false instead
  // applies the least-violation input and keeps going, which is the braking
  // behavior the closed loop needs to ride out transient infeasibility.
  bool halt_on_infeasible = true;
};

// Closed-loop episode: at each sampling instant measure, filter the nominal
// input through the barrier QP, apply actuation noise, and hold the result.
//   naive   phi = 0, full input box
//   sdcbf   margin from a point initial set at the measurement, full box
//   usdcbf  margin from the eps_x ball around the measurement, QP over the
//           eps_u-shrunk box
// The episode is refused when the initial s-chain check fails (sdcbf/usdcbf);
// a QP infeasibility under sdcbf/usdcbf or a diverging state ends it early.
SimLog run_episode(const CompiledScenario& sc, ControllerKind kind,
                   const NoiseModel& noise, const SimOptions& opts = {});
SimLog run_episode(const ScenarioConfig& cfg, ControllerKind kind,
                   const NoiseModel& noise, const SimOptions& opts = {});

// RFC-4180-style CSV with a header row; fine-grid time, state, held input,
// and every barrier value.
void write_trajectory_csv(const SimLog& log, std::ostream& out);
// Per-sample diagnostics: measurement, nominal/commanded/applied inputs,
// margins, QP status, compute time.
void write_steps_csv(const SimLog& log, std::ostream& out);
// Deterministic run summary (no timing): minima per barrier, violation
// flags, episode status. Byte-identical across same-seed runs.
void write_summary_json(const SimLog& log, const CompiledScenario& sc, std::ostream& out);
// Timing percentiles for the per-step compute cost; nondeterministic by
// nature, kept out of summary.json.
void write_timing_json(const SimLog& log, std::ostream& out);

}  // namespace sdcbf
