#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sdcbf/interval.hpp"

namespace sdcbf {

// Joint variable space for the stacked vector z = (x, u): state variables
// first, then input variables.
class VarSpace {
 public:
  VarSpace(std::vector<std::string> state_names, std::vector<std::string> input_names);

  // Conventional names x1..xn, u1..um.
  static std::shared_ptr<const VarSpace> make(int n_states, int m_inputs);

  int state_dim() const { return n_; }
  int input_dim() const { return static_cast<int>(names_.size()) - n_; }
  int dim() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(static_cast<size_t>(i)); }
  int index_of(const std::string& name) const;
  bool is_input(int i) const { return i >= n_; }
  bool operator==(const VarSpace& o) const { return n_ == o.n_ && names_ == o.names_; }
  bool operator!=(const VarSpace& o) const { return !(*this == o); }

 private:
  std::vector<std::string> names_;
  int n_;
};

using VarSpacePtr = std::shared_ptr<const VarSpace>;

using Mono = std::vector<uint32_t>;

// Sparse multivariate polynomial with real coefficients over a VarSpace.
// Immutable in spirit: all operations return new polynomials; add_term is the
// only mutator and is meant for construction.
class MultiPoly {
 public:
  explicit MultiPoly(VarSpacePtr space);
  static MultiPoly constant(VarSpacePtr space, double c);
  static MultiPoly variable(VarSpacePtr space, int index);

  const VarSpacePtr& space() const { return space_; }
  const std::map<Mono, double>& terms() const { return terms_; }
  int num_terms() const { return static_cast<int>(terms_.size()); }

  void add_term(const Mono& exponents, double coeff);

  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  int degree_in(int var) const;
  bool depends_on(int var) const;
  bool depends_on_inputs() const;
  bool is_affine() const { return degree() <= 1; }
  double constant_term() const;
  double coeff_of(const Mono& exponents) const;

  double eval(const Eigen::VectorXd& z) const;
  // Horner-style interval enclosure of the range over the box.
  Interval eval_box(const IntervalVector& box) const;
  // Plain per-monomial interval sum; wider but order-monotone when used for
  // Taylor remainder tails.
  Interval eval_box_monomial(const IntervalVector& box) const;

  MultiPoly derivative(int var) const;
  MultiPoly derivative(const std::string& var) const;
  // q with q(w) = p(z_star + w); binomial shift with exact integer binomials.
  MultiPoly recentered(const Eigen::VectorXd& z_star) const;
  MultiPoly truncated_to_degree(int max_total_degree) const;
  MultiPoly tail_above_degree(int max_total_degree) const;
  // Substitute fixed values for a subset of variables, keeping the space.
  MultiPoly substituted(const std::vector<std::pair<int, double>>& fixed) const;

  std::string to_string() const;

  bool operator==(const MultiPoly& o) const;
  bool operator!=(const MultiPoly& o) const { return !(*this == o); }

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a);
  friend MultiPoly operator*(double s, const MultiPoly& a);
  friend MultiPoly operator*(const MultiPoly& a, double s) { return s * a; }
  friend MultiPoly operator+(const MultiPoly& a, double s);
  friend MultiPoly operator-(const MultiPoly& a, double s) { return a + (-s); }

 private:
  using TermIt = std::map<Mono, double>::const_iterator;
  void accumulate(const Mono& m, double c);
  Interval horner_range(TermIt begin, TermIt end, int var, const IntervalVector& box) const;
  static void check_space(const MultiPoly& a, const MultiPoly& b);

  VarSpacePtr space_;
  std::map<Mono, double> terms_;
};

// Directional derivative of h along a state vector field: grad_x(h) . field.
// h must not depend on the input variables; the field components may.
MultiPoly lie_derivative(const MultiPoly& h, const std::vector<MultiPoly>& field);

// Gradient with respect to the state variables only.
std::vector<MultiPoly> state_gradient(const MultiPoly& h);

// Interval Taylor model: original(z) lies in poly(z - center) + remainder for
// every z in domain. poly is expressed in centered coordinates w = z - center.
struct TaylorModel {
  Eigen::VectorXd center;
  IntervalVector domain;
  MultiPoly poly;
  Interval remainder;
  int order = 0;

  IntervalVector centered_domain() const { return domain - center; }
};

TaylorModel build_taylor_model(const MultiPoly& p, const Eigen::VectorXd& z_star,
                               const IntervalVector& domain, int order);

// Parse an infix polynomial expression over the given space. Grammar:
// sums/differences of products of powered atoms; atoms are real literals,
// variable names, parenthesized expressions, or a unary-minus prefix;
// exponents are nonnegative integer literals after '^'.
MultiPoly parse_poly(const std::string& text, const VarSpacePtr& space);

}  // namespace sdcbf
