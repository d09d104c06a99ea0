#include "sdcbf/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "sdcbf/errors.hpp"

namespace sdcbf {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_num(const std::string& v, int line) {
  const char* str = v.c_str();
  char* end = nullptr;
  double x = std::strtod(str, &end);
  if (end == str || *end != '\0')
    throw ParseError("scenario line " + std::to_string(line) + ": bad number '" + v + "'");
  return x;
}

long parse_int(const std::string& v, int line) {
  const char* str = v.c_str();
  char* end = nullptr;
  long x = std::strtol(str, &end, 10);
  if (end == str || *end != '\0')
    throw ParseError("scenario line " + std::to_string(line) + ": bad integer '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& v, int line) {
  const char* str = v.c_str();
  char* end = nullptr;
  unsigned long long x = std::strtoull(str, &end, 10);
  if (end == str || *end != '\0')
    throw ParseError("scenario line " + std::to_string(line) + ": bad seed '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

std::vector<double> parse_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_num(trim(item), line));
  if (out.empty())
    throw ParseError("scenario line " + std::to_string(line) + ": empty list");
  return out;
}

std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list_str(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num_str(v[i]);
  }
  return out;
}

// Key "g3_2" -> (3, 2); returns false if the shape does not match.
bool split_indexed(const std::string& key, const std::string& prefix, int& i, int& j) {
  if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0) return false;
  std::string rest = key.substr(prefix.size());
  size_t us = rest.find('_');
  if (us == std::string::npos) return false;
  try {
    i = std::stoi(rest.substr(0, us));
    j = std::stoi(rest.substr(us + 1));
  } catch (...) {
    return false;
  }
  return i >= 1 && j >= 1;
}

bool split_single(const std::string& key, const std::string& prefix, int& i) {
  if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0) return false;
  try {
    i = std::stoi(key.substr(prefix.size()));
  } catch (...) {
    return false;
  }
  return i >= 1;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  cfg.noise_mode = "uniform_ball";

  std::string section;
  std::map<std::string, std::pair<std::string, int>> sys_kv;  // key -> (value, line)
  std::istringstream in(text);
  std::string raw;
  int line = 0;

  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError("scenario line " + std::to_string(line) + ": " + msg);
  };

  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw fail("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section == "barrier") {
        cfg.barriers.emplace_back();
      } else if (section != "system" && section != "sampling" && section != "noise" &&
                 section != "nominal" && section != "margin" && section != "initial") {
        throw fail("unknown section [" + section + "]");
      }
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) throw fail("expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw fail("empty key");

    if (section.empty()) {
      if (key == "name") cfg.name = val;
      else throw fail("unknown top-level key '" + key + "'");
    } else if (section == "system") {
      sys_kv[key] = {val, line};
    } else if (section == "barrier") {
      BarrierConfig& b = cfg.barriers.back();
      if (key == "h") b.h_expr = val;
      else if (key == "gamma") b.gamma = parse_num(val, line);
      else if (key == "a") b.a_vec = parse_list(val, line);
      else if (key == "lambdas") b.lambdas = parse_list(val, line);
      else throw fail("unknown key '" + key + "' in [barrier]");
    } else if (section == "sampling") {
      if (key == "dt") cfg.dt = parse_num(val, line);
      else if (key == "horizon") cfg.horizon = parse_num(val, line);
      else throw fail("unknown key '" + key + "' in [sampling]");
    } else if (section == "noise") {
      if (key == "eps_x") cfg.eps_x = parse_num(val, line);
      else if (key == "mode") cfg.noise_mode = val;
      else if (key == "seed") cfg.seed = parse_u64(val, line);
      else throw fail("unknown key '" + key + "' in [noise]");
    } else if (section == "nominal") {
      int idx = 0;
      if (key == "type") cfg.nominal.type = val;
      else if (key == "reference") cfg.nominal.reference = val;
      else if (key == "amplitude") cfg.nominal.amplitude = parse_num(val, line);
      else if (key == "period") cfg.nominal.period = parse_num(val, line);
      else if (key == "z_ref") cfg.nominal.z_ref = parse_num(val, line);
      else if (split_single(key, "u", idx)) {
        if (static_cast<size_t>(idx) > cfg.nominal.exprs.size())
          cfg.nominal.exprs.resize(static_cast<size_t>(idx));
        cfg.nominal.exprs[static_cast<size_t>(idx - 1)] = val;
      } else if (split_single(key, "k", idx)) {
        if (static_cast<size_t>(idx) > cfg.nominal.k_rows.size())
          cfg.nominal.k_rows.resize(static_cast<size_t>(idx));
        cfg.nominal.k_rows[static_cast<size_t>(idx - 1)] = parse_list(val, line);
      } else {
        throw fail("unknown key '" + key + "' in [nominal]");
      }
    } else if (section == "margin") {
      if (key == "taylor_order") cfg.taylor_order = static_cast<int>(parse_int(val, line));
      else if (key == "pop_tol") cfg.pop_tol = parse_num(val, line);
      else if (key == "pop_budget") cfg.pop_budget = parse_int(val, line);
      else throw fail("unknown key '" + key + "' in [margin]");
    } else if (section == "initial") {
      if (key == "x0") cfg.x0 = parse_list(val, line);
      else throw fail("unknown key '" + key + "' in [initial]");
    }
  }

  // Materialize the [system] keys once dimensions are known.
  auto take = [&](const std::string& key) -> const std::pair<std::string, int>* {
    auto it = sys_kv.find(key);
    return it == sys_kv.end() ? nullptr : &it->second;
  };
  const auto* states = take("states");
  const auto* inputs = take("inputs");
  if (!sys_kv.empty() && (!states || !inputs))
    throw ParseError("scenario: [system] must declare states and inputs");
  if (states) cfg.state_dim = static_cast<int>(parse_int(states->first, states->second));
  if (inputs) cfg.input_dim = static_cast<int>(parse_int(inputs->first, inputs->second));
  if (cfg.state_dim < 0 || cfg.input_dim < 0)
    throw ParseError("scenario: states/inputs must be nonnegative");

  const int n = cfg.state_dim, m = cfg.input_dim;
  cfg.f_exprs.assign(static_cast<size_t>(n), "0");
  cfg.g_exprs.assign(static_cast<size_t>(n),
                     std::vector<std::string>(static_cast<size_t>(m), "0"));
  cfg.u_lo.assign(static_cast<size_t>(m), 0.0);
  cfg.u_hi.assign(static_cast<size_t>(m), 0.0);
  std::vector<bool> lo_seen(static_cast<size_t>(m), false), hi_seen(static_cast<size_t>(m), false);

  for (const auto& [key, vp] : sys_kv) {
    const auto& [val, kline] = vp;
    int i = 0, j = 0;
    if (key == "states" || key == "inputs") continue;
    if (key == "eps_u") {
      cfg.eps_u = parse_num(val, kline);
    } else if (split_indexed(key, "g", i, j)) {
      if (i > n || j > m)
        throw ParseError("scenario line " + std::to_string(kline) + ": " + key +
                         " out of range");
      cfg.g_exprs[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] = val;
    } else if (split_single(key, "f", i)) {
      if (i > n)
        throw ParseError("scenario line " + std::to_string(kline) + ": " + key +
                         " out of range");
      cfg.f_exprs[static_cast<size_t>(i - 1)] = val;
    } else if (key.size() > 4 && key.compare(key.size() - 4, 4, "_min") == 0 &&
               split_single(key.substr(0, key.size() - 4), "u", i)) {
      if (i > m)
        throw ParseError("scenario line " + std::to_string(kline) + ": " + key +
                         " out of range");
      cfg.u_lo[static_cast<size_t>(i - 1)] = parse_num(val, kline);
      lo_seen[static_cast<size_t>(i - 1)] = true;
    } else if (key.size() > 4 && key.compare(key.size() - 4, 4, "_max") == 0 &&
               split_single(key.substr(0, key.size() - 4), "u", i)) {
      if (i > m)
        throw ParseError("scenario line " + std::to_string(kline) + ": " + key +
                         " out of range");
      cfg.u_hi[static_cast<size_t>(i - 1)] = parse_num(val, kline);
      hi_seen[static_cast<size_t>(i - 1)] = true;
    } else {
      throw ParseError("scenario line " + std::to_string(kline) + ": unknown key '" + key +
                       "' in [system]");
    }
  }
  for (int j = 0; j < m; ++j)
    if (!lo_seen[static_cast<size_t>(j)] || !hi_seen[static_cast<size_t>(j)])
      throw ParseError("scenario: missing u" + std::to_string(j + 1) + "_min/_max");

  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("scenario: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "name = " << cfg.name << "\n\n[system]\n";
  out << "states = " << cfg.state_dim << "\n";
  out << "inputs = " << cfg.input_dim << "\n";
  for (int i = 0; i < cfg.state_dim; ++i)
    out << "f" << (i + 1) << " = " << cfg.f_exprs[static_cast<size_t>(i)] << "\n";
  for (int i = 0; i < cfg.state_dim; ++i)
    for (int j = 0; j < cfg.input_dim; ++j)
      out << "g" << (i + 1) << "_" << (j + 1) << " = "
          << cfg.g_exprs[static_cast<size_t>(i)][static_cast<size_t>(j)] << "\n";
  for (int j = 0; j < cfg.input_dim; ++j) {
    out << "u" << (j + 1) << "_min = " << num_str(cfg.u_lo[static_cast<size_t>(j)]) << "\n";
    out << "u" << (j + 1) << "_max = " << num_str(cfg.u_hi[static_cast<size_t>(j)]) << "\n";
  }
  out << "eps_u = " << num_str(cfg.eps_u) << "\n";
  for (const auto& b : cfg.barriers) {
    out << "\n[barrier]\n";
    out << "h = " << b.h_expr << "\n";
    if (b.gamma != 0.0) out << "gamma = " << num_str(b.gamma) << "\n";
    if (!b.a_vec.empty()) out << "a = " << list_str(b.a_vec) << "\n";
    if (!b.lambdas.empty()) out << "lambdas = " << list_str(b.lambdas) << "\n";
  }
  out << "\n[sampling]\n";
  out << "dt = " << num_str(cfg.dt) << "\n";
  out << "horizon = " << num_str(cfg.horizon) << "\n";
  out << "\n[noise]\n";
  out << "eps_x = " << num_str(cfg.eps_x) << "\n";
  out << "mode = " << cfg.noise_mode << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "\n[nominal]\n";
  out << "type = " << cfg.nominal.type << "\n";
  if (cfg.nominal.type == "tracking") {
    out << "reference = " << cfg.nominal.reference << "\n";
    out << "amplitude = " << num_str(cfg.nominal.amplitude) << "\n";
    out << "period = " << num_str(cfg.nominal.period) << "\n";
    out << "z_ref = " << num_str(cfg.nominal.z_ref) << "\n";
    for (size_t i = 0; i < cfg.nominal.k_rows.size(); ++i)
      out << "k" << (i + 1) << " = " << list_str(cfg.nominal.k_rows[i]) << "\n";
  } else {
    for (size_t j = 0; j < cfg.nominal.exprs.size(); ++j)
      out << "u" << (j + 1) << " = " << cfg.nominal.exprs[j] << "\n";
  }
  out << "\n[margin]\n";
  out << "taylor_order = " << cfg.taylor_order << "\n";
  out << "pop_tol = " << num_str(cfg.pop_tol) << "\n";
  out << "pop_budget = " << cfg.pop_budget << "\n";
  out << "\n[initial]\n";
  out << "x0 = " << list_str(cfg.x0) << "\n";
  return out.str();
}

Eigen::VectorXd CompiledScenario::reference(double t) const {
  const double w = 2.0 * M_PI / config.nominal.period;
  const double A = config.nominal.amplitude;
  Eigen::VectorXd r(6);
  r << A * std::sin(w * t), 0.5 * A * std::sin(2.0 * w * t), config.nominal.z_ref,
      A * w * std::cos(w * t), A * w * std::cos(2.0 * w * t), 0.0;
  return r;
}

Eigen::VectorXd CompiledScenario::nominal(double t, const Eigen::VectorXd& x_meas) const {
  const int n = space->state_dim();
  const int m = space->input_dim();
  if (x_meas.size() != n) throw DimensionError("nominal: state dimension mismatch");
  Eigen::VectorXd u(m);
  if (tracking) {
    u = K * (reference(t) - x_meas);
  } else {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n + m);
    z.head(n) = x_meas;
    for (int j = 0; j < m; ++j) u[j] = nominal_exprs[static_cast<size_t>(j)].eval(z);
  }
  for (int j = 0; j < m; ++j)
    u[j] = std::min(std::max(u[j], sys.U_box[j].lo()), sys.U_box[j].hi());
  return u;
}

MarginOptions CompiledScenario::margin_options() const {
  MarginOptions opts;
  opts.order = config.taylor_order;
  opts.tol = config.pop_tol;
  opts.node_budget = config.pop_budget;
  return opts;
}

CompiledScenario compile_scenario(const ScenarioConfig& cfg) {
  const int n = cfg.state_dim, m = cfg.input_dim;
  if (n < 1) throw DomainError("scenario: states must be >= 1");
  if (m < 1) throw DomainError("scenario: inputs must be >= 1");
  if (cfg.f_exprs.size() != static_cast<size_t>(n))
    throw DimensionError("scenario: f expression count != states");
  if (cfg.g_exprs.size() != static_cast<size_t>(n))
    throw DimensionError("scenario: g row count != states");
  for (const auto& row : cfg.g_exprs)
    if (row.size() != static_cast<size_t>(m))
      throw DimensionError("scenario: g column count != inputs");
  if (cfg.u_lo.size() != static_cast<size_t>(m) || cfg.u_hi.size() != static_cast<size_t>(m))
    throw DimensionError("scenario: input bound count != inputs");
  if (!(cfg.dt > 0.0)) throw DomainError("scenario: dt must be positive");
  if (!(cfg.horizon >= cfg.dt)) throw DomainError("scenario: horizon must be >= dt");
  if (!(cfg.eps_x >= 0.0)) throw DomainError("scenario: eps_x must be >= 0");
  if (!(cfg.eps_u >= 0.0)) throw DomainError("scenario: eps_u must be >= 0");
  if (cfg.taylor_order < 1) throw DomainError("scenario: taylor_order must be >= 1");
  if (!(cfg.pop_tol > 0.0)) throw DomainError("scenario: pop_tol must be positive");
  if (cfg.pop_budget < 1) throw DomainError("scenario: pop_budget must be >= 1");
  if (cfg.noise_mode != "none" && cfg.noise_mode != "uniform_ball" &&
      cfg.noise_mode != "adversarial")
    throw DomainError("scenario: unknown noise mode '" + cfg.noise_mode + "'");
  if (cfg.barriers.empty()) throw DomainError("scenario: at least one barrier required");
  if (cfg.x0.size() != static_cast<size_t>(n))
    throw DimensionError("scenario: x0 dimension != states");

  VarSpacePtr space = VarSpace::make(n, m);
  std::vector<MultiPoly> f;
  for (int i = 0; i < n; ++i) {
    MultiPoly p = parse_poly(cfg.f_exprs[static_cast<size_t>(i)], space);
    if (p.depends_on_inputs())
      throw DomainError("scenario: f" + std::to_string(i + 1) + " must be state-only");
    f.push_back(std::move(p));
  }
  std::vector<std::vector<MultiPoly>> g;
  for (int i = 0; i < n; ++i) {
    std::vector<MultiPoly> row;
    for (int j = 0; j < m; ++j) {
      MultiPoly p =
          parse_poly(cfg.g_exprs[static_cast<size_t>(i)][static_cast<size_t>(j)], space);
      if (p.depends_on_inputs())
        throw DomainError("scenario: g" + std::to_string(i + 1) + "_" + std::to_string(j + 1) +
                          " must be state-only");
      row.push_back(std::move(p));
    }
    g.push_back(std::move(row));
  }
  IntervalVector U(m);
  for (int j = 0; j < m; ++j) {
    double lo = cfg.u_lo[static_cast<size_t>(j)], hi = cfg.u_hi[static_cast<size_t>(j)];
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
      throw DomainError("scenario: bad bounds for u" + std::to_string(j + 1));
    U[j] = Interval(lo, hi);
  }

  Eigen::VectorXd x0(n);
  for (int i = 0; i < n; ++i) {
    x0[i] = cfg.x0[static_cast<size_t>(i)];
    if (!std::isfinite(x0[i])) throw DomainError("scenario: x0 must be finite");
  }

  CompiledScenario sc{cfg, space, ControlAffineSystem{f, g, U, cfg.eps_u}, {}, x0, {}, {}, false};

  // Probe x0 plus small axis offsets: input coefficients may vanish exactly at
  // x0 (resting equilibria), so a lone probe under-detects the degree.
  std::vector<Eigen::VectorXd> probes{x0};
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p = x0;
    p[i] += 0.1;
    probes.push_back(p);
    p[i] -= 0.2;
    probes.push_back(p);
  }

  for (size_t bi = 0; bi < cfg.barriers.size(); ++bi) {
    const BarrierConfig& b = cfg.barriers[bi];
    const std::string label = "barrier " + std::to_string(bi + 1);
    MultiPoly h = parse_poly(b.h_expr, space);
    if (h.depends_on_inputs()) throw DomainError("scenario: " + label + " must be state-only");
    int r = relative_degree(h, sc.sys, probes);

    double gamma = 0.0;
    Eigen::VectorXd a, lambdas;
    if (r == 1) {
      if (!(b.gamma > 0.0))
        throw DomainError("scenario: " + label + " has relative degree 1, needs gamma > 0");
      if (!b.a_vec.empty())
        throw DomainError("scenario: " + label + " has relative degree 1, drop the a vector");
      gamma = b.gamma;
    } else {
      if (b.gamma != 0.0)
        throw DomainError("scenario: " + label + " has relative degree " + std::to_string(r) +
                          ", drop gamma");
      if (b.a_vec.size() != static_cast<size_t>(r))
        throw DomainError("scenario: " + label + " needs an a vector of length " +
                          std::to_string(r));
      a = Eigen::Map<const Eigen::VectorXd>(b.a_vec.data(), r);
      if (!b.lambdas.empty()) {
        if (b.lambdas.size() != static_cast<size_t>(r))
          throw DomainError("scenario: " + label + " lambda count != relative degree");
        lambdas = Eigen::Map<const Eigen::VectorXd>(b.lambdas.data(), r);
        Eigen::VectorXd re = a_from_lambdas(lambdas);
        for (int i = 0; i < r; ++i)
          if (std::abs(re[i] - a[i]) > 1e-6 * (1.0 + std::abs(a[i])))
            throw DomainError("scenario: " + label + " lambdas do not expand to a");
      } else {
        lambdas = lambdas_from_a(a);
      }
    }

    CBFSpec spec{h, gamma, a, lambdas};
    MultiPoly xi = build_xi(spec, sc.sys, r);
    CompiledBarrier cb(h, xi);
    cb.r = r;
    cb.gamma = gamma;
    cb.a_vec = a;
    cb.lambdas = lambdas;
    cb.s_chain = (r >= 2) ? build_s_chain(spec, sc.sys, r) : std::vector<MultiPoly>{h};
    sc.barriers.push_back(std::move(cb));
  }

  const NominalConfig& nom = cfg.nominal;
  if (nom.type == "expression") {
    if (nom.exprs.size() != static_cast<size_t>(m))
      throw DomainError("scenario: nominal needs one expression per input");
    for (int j = 0; j < m; ++j) {
      MultiPoly p = parse_poly(nom.exprs[static_cast<size_t>(j)], space);
      if (p.depends_on_inputs())
        throw DomainError("scenario: nominal u" + std::to_string(j + 1) + " must be state-only");
      sc.nominal_exprs.push_back(std::move(p));
    }
  } else if (nom.type == "tracking") {
    if (nom.reference != "lemniscate")
      throw DomainError("scenario: unknown reference '" + nom.reference + "'");
    if (n != 6 || m != 3)
      throw DomainError("scenario: lemniscate tracking expects 6 states and 3 inputs");
    if (!(nom.period > 0.0)) throw DomainError("scenario: reference period must be positive");
    if (nom.k_rows.size() != static_cast<size_t>(m))
      throw DomainError("scenario: tracking needs one k row per input");
    sc.K.resize(m, n);
    for (int i = 0; i < m; ++i) {
      if (nom.k_rows[static_cast<size_t>(i)].size() != static_cast<size_t>(n))
        throw DomainError("scenario: k" + std::to_string(i + 1) + " needs " +
                          std::to_string(n) + " entries");
      for (int j = 0; j < n; ++j)
        sc.K(i, j) = nom.k_rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    sc.tracking = true;
  } else {
    throw DomainError("scenario: unknown nominal type '" + nom.type + "'");
  }

  return sc;
}

std::string ValidationReport::text() const {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += "\n";
  }
  return out;
}

ValidationReport validate_scenario(const ScenarioConfig& cfg) {
  ValidationReport rep;
  std::optional<CompiledScenario> compiled;
  try {
    compiled = compile_scenario(cfg);
  } catch (const Error& e) {
    rep.ok = false;
    rep.lines.push_back(std::string("error: ") + e.what());
    return rep;
  }
  const CompiledScenario& sc = *compiled;

  rep.lines.push_back("scenario '" + cfg.name + "': " + std::to_string(cfg.state_dim) +
                      " states, " + std::to_string(cfg.input_dim) + " inputs, " +
                      std::to_string(sc.barriers.size()) + " barrier(s)");
  std::ostringstream fmt;
  for (size_t i = 0; i < sc.barriers.size(); ++i) {
    const CompiledBarrier& b = sc.barriers[i];
    fmt.str("");
    fmt << "barrier " << (i + 1) << ": relative degree " << b.r;
    if (b.r == 1) {
      fmt << ", gamma = " << b.gamma;
    } else {
      fmt << ", a = (";
      for (int k = 0; k < b.a_vec.size(); ++k) fmt << (k ? ", " : "") << b.a_vec[k];
      fmt << "), lambda = (";
      for (int k = 0; k < b.lambdas.size(); ++k) fmt << (k ? ", " : "") << b.lambdas[k];
      fmt << ")";
    }
    rep.lines.push_back(fmt.str());
  }

  try {
    IntervalVector shrunk = shrink_input_box(sc.sys.U_box, cfg.eps_u);
    fmt.str("");
    fmt << "input box after eps_u = " << cfg.eps_u << " shrink: ";
    for (int j = 0; j < static_cast<int>(shrunk.size()); ++j)
      fmt << (j ? " x " : "") << "[" << shrunk[j].lo() << ", " << shrunk[j].hi() << "]";
    rep.lines.push_back(fmt.str());
  } catch (const InfeasibleInputSet& e) {
    rep.ok = false;
    rep.lines.push_back(std::string("infeasible input set: ") + e.what());
  }

  for (size_t i = 0; i < sc.barriers.size(); ++i) {
    const CompiledBarrier& b = sc.barriers[i];
    bool sat = false;
    try {
      sat = check_initial_condition(b.s_chain, sc.x0, cfg.eps_x, sc.margin_options());
    } catch (const Error& e) {
      rep.ok = false;
      rep.lines.push_back("barrier " + std::to_string(i + 1) +
                          ": initial condition check failed: " + e.what());
      continue;
    }
    fmt.str("");
    fmt << "barrier " << (i + 1) << ": initial condition over the eps_x = " << cfg.eps_x
        << " ball: " << (sat ? "satisfied" : "violated");
    rep.lines.push_back(fmt.str());
    if (!sat) rep.ok = false;
  }
  return rep;
}

}  // namespace sdcbf
