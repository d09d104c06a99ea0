#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sdcbf/controller.hpp"
#include "sdcbf/margin.hpp"

namespace sdcbf {

// Declarative experiment description. Parsed from a plain-text key/value
// format with one [section] per concern; polynomial fields are infix
// expression strings over x1..xn (and u1..um where inputs make sense).
struct BarrierConfig {
  std::string h_expr;
  double gamma = 0.0;              // first-order barriers
  std::vector<double> a_vec;       // higher-order barriers
  std::vector<double> lambdas;     // optional; derived from a_vec when empty

  bool operator==(const BarrierConfig&) const = default;
};

struct NominalConfig {
  std::string type = "expression";     // "expression" | "tracking"
  std::vector<std::string> exprs;      // expression mode: one per input, states only
  std::vector<std::vector<double>> k_rows;  // tracking mode: m x n gain matrix
  std::string reference = "lemniscate";
  double amplitude = 0.65;
  double period = 10.0;
  double z_ref = 0.3;

  bool operator==(const NominalConfig&) const = default;
};

struct ScenarioConfig {
  std::string name;
  int state_dim = 0;
  int input_dim = 0;
  std::vector<std::string> f_exprs;               // n entries
  std::vector<std::vector<std::string>> g_exprs;  // n x m entries
  std::vector<double> u_lo, u_hi;
  double eps_u = 0.0;
  std::vector<BarrierConfig> barriers;
  double dt = 0.02;
  double horizon = 10.0;
  double eps_x = 0.0;
  std::string noise_mode = "uniform_ball";  // none | uniform_ball | adversarial
  std::uint64_t seed = 0;
  NominalConfig nominal;
  int taylor_order = 2;
  double pop_tol = 1e-6;
  long pop_budget = 20000;
  std::vector<double> x0;

  bool operator==(const ScenarioConfig&) const = default;
};

// Parse the text form. Throws ParseError with line diagnostics on malformed
// input; structural checks (dimensions present, expressions parse) happen in
// compile_scenario, not here.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

// Canonical text form; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& cfg);

// A scenario with every expression parsed and every barrier closed over its
// relative degree, ready to run.
struct CompiledBarrier {
  MultiPoly h;
  int r = 1;
  double gamma = 0.0;
  Eigen::VectorXd a_vec;    // size r for r >= 2
  Eigen::VectorXd lambdas;  // size r for r >= 2
  MultiPoly xi;
  std::vector<MultiPoly> s_chain;  // {h} for r = 1, else s_0..s_{r-1}

  CompiledBarrier(MultiPoly h_, MultiPoly xi_) : h(std::move(h_)), xi(std::move(xi_)) {}
};

struct CompiledScenario {
  ScenarioConfig config;
  VarSpacePtr space;
  ControlAffineSystem sys;
  std::vector<CompiledBarrier> barriers;
  Eigen::VectorXd x0;
  std::vector<MultiPoly> nominal_exprs;  // expression mode
  Eigen::MatrixXd K;                     // tracking mode, m x n
  bool tracking = false;

  // Full-state reference for tracking mode (position + velocity).
  Eigen::VectorXd reference(double t) const;
  // Nominal input at measured state, clamped to the input box.
  Eigen::VectorXd nominal(double t, const Eigen::VectorXd& x_meas) const;
  MarginOptions margin_options() const;
};

// Builds the runnable form: parses all expressions, detects each barrier's
// relative degree (probing x0 and axis offsets around it), derives or checks
// the lambda decomposition, and validates dimensions. Throws DomainError /
// DimensionError / ParseError / RelativeDegreeError on bad configs.
CompiledScenario compile_scenario(const ScenarioConfig& cfg);

// Side-effect-free static validation; failures land in the report instead of
// throwing. ok == true iff the scenario compiles and every barrier passes the
// initial-condition check with the configured eps_x.
struct ValidationReport {
  bool ok = true;
  std::vector<std::string> lines;
  std::string text() const;
};
ValidationReport validate_scenario(const ScenarioConfig& cfg);

}  // namespace sdcbf
