#include "sdcbf/poly.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "sdcbf/errors.hpp"

namespace sdcbf {

VarSpace::VarSpace(std::vector<std::string> state_names, std::vector<std::string> input_names)
    : names_(std::move(state_names)), n_(static_cast<int>(names_.size())) {
  names_.insert(names_.end(), input_names.begin(), input_names.end());
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw DomainError("variable space: empty variable name");
    if (!seen.insert(name).second)
      throw DomainError("variable space: duplicate variable name '" + name + "'");
  }
}

std::shared_ptr<const VarSpace> VarSpace::make(int n_states, int m_inputs) {
  if (n_states < 0 || m_inputs < 0) throw DimensionError("variable space: negative dimension");
  std::vector<std::string> xs, us;
  for (int i = 1; i <= n_states; ++i) xs.push_back("x" + std::to_string(i));
  for (int i = 1; i <= m_inputs; ++i) us.push_back("u" + std::to_string(i));
  return std::make_shared<const VarSpace>(std::move(xs), std::move(us));
}

int VarSpace::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

MultiPoly::MultiPoly(VarSpacePtr space) : space_(std::move(space)) {
  if (!space_) throw DomainError("polynomial: null variable space");
}

MultiPoly MultiPoly::constant(VarSpacePtr space, double c) {
  MultiPoly p(std::move(space));
  p.add_term(Mono(static_cast<size_t>(p.space_->dim()), 0), c);
  return p;
}

MultiPoly MultiPoly::variable(VarSpacePtr space, int index) {
  MultiPoly p(std::move(space));
  if (index < 0 || index >= p.space_->dim())
    throw DimensionError("polynomial: variable index out of range");
  Mono m(static_cast<size_t>(p.space_->dim()), 0);
  m[static_cast<size_t>(index)] = 1;
  p.add_term(m, 1.0);
  return p;
}

void MultiPoly::add_term(const Mono& exponents, double coeff) {
  if (static_cast<int>(exponents.size()) != space_->dim())
    throw DimensionError("polynomial: exponent vector length mismatch");
  accumulate(exponents, coeff);
}

void MultiPoly::accumulate(const Mono& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

int MultiPoly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_)
    d = std::max(d, static_cast<int>(std::accumulate(m.begin(), m.end(), 0u)));
  return d;
}

int MultiPoly::degree_in(int var) const {
  if (var < 0 || var >= space_->dim()) throw DimensionError("polynomial: variable index out of range");
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m[static_cast<size_t>(var)]));
  return d;
}

bool MultiPoly::depends_on(int var) const {
  if (var < 0 || var >= space_->dim()) throw DimensionError("polynomial: variable index out of range");
  for (const auto& [m, c] : terms_)
    if (m[static_cast<size_t>(var)] > 0) return true;
  return false;
}

bool MultiPoly::depends_on_inputs() const {
  for (int v = space_->state_dim(); v < space_->dim(); ++v)
    if (depends_on(v)) return true;
  return false;
}

double MultiPoly::constant_term() const {
  Mono zero(static_cast<size_t>(space_->dim()), 0);
  auto it = terms_.find(zero);
  return it == terms_.end() ? 0.0 : it->second;
}

double MultiPoly::coeff_of(const Mono& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? 0.0 : it->second;
}

double MultiPoly::eval(const Eigen::VectorXd& z) const {
  if (static_cast<int>(z.size()) != space_->dim())
    throw DimensionError("polynomial: evaluation point dimension mismatch");
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (size_t v = 0; v < m.size(); ++v) {
      double zv = z[static_cast<Eigen::Index>(v)];
      for (uint32_t e = 0; e < m[v]; ++e) t *= zv;
    }
    acc += t;
  }
  return acc;
}

Interval MultiPoly::horner_range(TermIt begin, TermIt end, int var, const IntervalVector& box) const {
  if (begin == end) return Interval(0.0);
  if (var == space_->dim()) return Interval(begin->second);
  struct Group {
    uint32_t exp;
    TermIt begin, end;
  };
  std::vector<Group> groups;
  for (TermIt it = begin; it != end;) {
    uint32_t e = it->first[static_cast<size_t>(var)];
    TermIt gb = it;
    while (it != end && it->first[static_cast<size_t>(var)] == e) ++it;
    groups.push_back({e, gb, it});
  }
  Interval acc = horner_range(groups.back().begin, groups.back().end, var + 1, box);
  for (int gi = static_cast<int>(groups.size()) - 2; gi >= 0; --gi) {
    unsigned step = groups[static_cast<size_t>(gi) + 1].exp - groups[static_cast<size_t>(gi)].exp;
    acc = acc * pow(box[var], step) +
          horner_range(groups[static_cast<size_t>(gi)].begin, groups[static_cast<size_t>(gi)].end,
                       var + 1, box);
  }
  return acc * pow(box[var], groups.front().exp);
}

Interval MultiPoly::eval_box(const IntervalVector& box) const {
  if (box.size() != space_->dim())
    throw DimensionError("polynomial: evaluation box dimension mismatch");
  return horner_range(terms_.begin(), terms_.end(), 0, box);
}

Interval MultiPoly::eval_box_monomial(const IntervalVector& box) const {
  if (box.size() != space_->dim())
    throw DimensionError("polynomial: evaluation box dimension mismatch");
  Interval acc(0.0);
  for (const auto& [m, c] : terms_) {
    Interval t(c);
    for (size_t v = 0; v < m.size(); ++v)
      if (m[v] > 0) t = t * pow(box[static_cast<int>(v)], m[v]);
    acc = acc + t;
  }
  return acc;
}

MultiPoly MultiPoly::derivative(int var) const {
  if (var < 0 || var >= space_->dim()) throw DimensionError("polynomial: variable index out of range");
  MultiPoly out(space_);
  for (const auto& [m, c] : terms_) {
    uint32_t e = m[static_cast<size_t>(var)];
    if (e == 0) continue;
    Mono dm = m;
    dm[static_cast<size_t>(var)] = e - 1;
    out.accumulate(dm, c * static_cast<double>(e));
  }
  return out;
}

MultiPoly MultiPoly::derivative(const std::string& var) const {
  int idx = space_->index_of(var);
  if (idx < 0) throw DomainError("polynomial: unknown variable '" + var + "'");
  return derivative(idx);
}

namespace {

std::vector<std::vector<double>> pascal_triangle(unsigned max_n) {
  std::vector<std::vector<double>> c(max_n + 1);
  for (unsigned n = 0; n <= max_n; ++n) {
    c[n].assign(n + 1, 1.0);
    for (unsigned k = 1; k < n; ++k) c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
  }
  return c;
}

}  // namespace

MultiPoly MultiPoly::recentered(const Eigen::VectorXd& z_star) const {
  int d = space_->dim();
  if (static_cast<int>(z_star.size()) != d)
    throw DimensionError("polynomial: recenter point dimension mismatch");
  unsigned max_e = 0;
  for (const auto& [m, c] : terms_)
    for (uint32_t e : m) max_e = std::max(max_e, e);
  auto binom = pascal_triangle(max_e);
  std::vector<std::vector<double>> zpow(static_cast<size_t>(d));
  for (int v = 0; v < d; ++v) {
    unsigned dv = static_cast<unsigned>(degree_in(v));
    zpow[static_cast<size_t>(v)].assign(dv + 1, 1.0);
    for (unsigned j = 1; j <= dv; ++j)
      zpow[static_cast<size_t>(v)][j] = zpow[static_cast<size_t>(v)][j - 1] * z_star[v];
  }
  MultiPoly out(space_);
  for (const auto& [m, c] : terms_) {
    std::map<Mono, double> cur;
    cur.emplace(Mono(static_cast<size_t>(d), 0), c);
    for (int v = 0; v < d; ++v) {
      uint32_t e = m[static_cast<size_t>(v)];
      if (e == 0) continue;
      std::map<Mono, double> next;
      for (const auto& [m2, c2] : cur) {
        for (uint32_t k = 0; k <= e; ++k) {
          double coeff = c2 * binom[e][k] * zpow[static_cast<size_t>(v)][e - k];
          if (coeff == 0.0) continue;
          Mono m3 = m2;
          m3[static_cast<size_t>(v)] += k;
          next[m3] += coeff;
        }
      }
      cur = std::move(next);
    }
    for (const auto& [m3, c3] : cur) out.accumulate(m3, c3);
  }
  return out;
}

MultiPoly MultiPoly::truncated_to_degree(int max_total_degree) const {
  MultiPoly out(space_);
  for (const auto& [m, c] : terms_)
    if (static_cast<int>(std::accumulate(m.begin(), m.end(), 0u)) <= max_total_degree)
      out.accumulate(m, c);
  return out;
}

MultiPoly MultiPoly::tail_above_degree(int max_total_degree) const {
  MultiPoly out(space_);
  for (const auto& [m, c] : terms_)
    if (static_cast<int>(std::accumulate(m.begin(), m.end(), 0u)) > max_total_degree)
      out.accumulate(m, c);
  return out;
}

MultiPoly MultiPoly::substituted(const std::vector<std::pair<int, double>>& fixed) const {
  for (const auto& [v, val] : fixed)
    if (v < 0 || v >= space_->dim())
      throw DimensionError("polynomial: substitution index out of range");
  MultiPoly out(space_);
  for (const auto& [m, c] : terms_) {
    double coeff = c;
    Mono m2 = m;
    for (const auto& [v, val] : fixed) {
      uint32_t e = m2[static_cast<size_t>(v)];
      for (uint32_t j = 0; j < e; ++j) coeff *= val;
      m2[static_cast<size_t>(v)] = 0;
    }
    out.accumulate(m2, coeff);
  }
  return out;
}

void MultiPoly::check_space(const MultiPoly& a, const MultiPoly& b) {
  if (a.space_ != b.space_ && *a.space_ != *b.space_)
    throw DimensionError("polynomial: variable space mismatch");
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly::check_space(a, b);
  MultiPoly out = a;
  for (const auto& [m, c] : b.terms_) out.accumulate(m, c);
  return out;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly::check_space(a, b);
  MultiPoly out = a;
  for (const auto& [m, c] : b.terms_) out.accumulate(m, -c);
  return out;
}

MultiPoly operator-(const MultiPoly& a) {
  MultiPoly out(a.space_);
  for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, -c);
  return out;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly::check_space(a, b);
  MultiPoly out(a.space_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Mono m = ma;
      for (size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
      out.accumulate(m, ca * cb);
    }
  }
  return out;
}

MultiPoly operator*(double s, const MultiPoly& a) {
  MultiPoly out(a.space_);
  if (s == 0.0) return out;
  for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, s * c);
  return out;
}

MultiPoly operator+(const MultiPoly& a, double s) {
  MultiPoly out = a;
  out.accumulate(Mono(static_cast<size_t>(a.space_->dim()), 0), s);
  return out;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
  return (*space_ == *o.space_) && terms_ == o.terms_;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  char buf[64];
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    double c = it->second;
    if (first) {
      if (c < 0) {
        out += "-";
        c = -c;
      }
    } else {
      out += (c < 0) ? " - " : " + ";
      c = std::abs(c);
    }
    first = false;
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    out += buf;
    for (size_t v = 0; v < it->first.size(); ++v) {
      uint32_t e = it->first[v];
      if (e == 0) continue;
      out += "*" + space_->name(static_cast<int>(v));
      if (e > 1) {
        std::snprintf(buf, sizeof(buf), "^%u", e);
        out += buf;
      }
    }
  }
  return out;
}

MultiPoly lie_derivative(const MultiPoly& h, const std::vector<MultiPoly>& field) {
  const auto& space = h.space();
  if (static_cast<int>(field.size()) != space->state_dim())
    throw DimensionError("lie derivative: field length must equal state dimension");
  if (h.depends_on_inputs())
    throw DomainError("lie derivative: h must depend only on state variables");
  MultiPoly out(space);
  for (int v = 0; v < space->state_dim(); ++v)
    out = out + h.derivative(v) * field[static_cast<size_t>(v)];
  return out;
}

std::vector<MultiPoly> state_gradient(const MultiPoly& h) {
  std::vector<MultiPoly> g;
  for (int v = 0; v < h.space()->state_dim(); ++v) g.push_back(h.derivative(v));
  return g;
}

TaylorModel build_taylor_model(const MultiPoly& p, const Eigen::VectorXd& z_star,
                               const IntervalVector& domain, int order) {
  if (order < 0) throw DomainError("taylor model: negative order");
  if (domain.size() != p.space()->dim())
    throw DimensionError("taylor model: domain dimension mismatch");
  if (!domain.contains(z_star)) throw DomainError("taylor model: expansion point outside domain");
  MultiPoly q = p.recentered(z_star);
  MultiPoly trunc = q.truncated_to_degree(order);
  MultiPoly tail = q.tail_above_degree(order);
  IntervalVector w = domain - z_star;
  Interval remainder = tail.is_zero() ? Interval(0.0) : tail.eval_box_monomial(w);
  return TaylorModel{z_star, domain, std::move(trunc), remainder, order};
}

}  // namespace sdcbf
