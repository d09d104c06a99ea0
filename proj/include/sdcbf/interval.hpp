#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sdcbf/errors.hpp"

namespace sdcbf {

namespace rnd {

inline double widen_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

inline double widen_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline double widen(double x, bool up) { return up ? widen_up(x) : widen_down(x); }

// Directed sum: round-to-nearest result, corrected by one ulp when the
// TwoSum residual lands on the unsafe side of the requested direction.
inline double add_dir(double a, double b, bool up) {
  double s = a + b;
  if (!std::isfinite(s)) {
    if (std::isnan(s)) throw DomainError("interval: NaN in addition");
    if (up) return s > 0 ? s : -std::numeric_limits<double>::max();
    return s < 0 ? s : std::numeric_limits<double>::max();
  }
  double ap = s - b;
  double bp = s - ap;
  double err = (a - ap) + (b - bp);
  if (!std::isfinite(err)) return widen(s, up);
  if (up ? err > 0 : err < 0) s = widen(s, up);
  return s;
}

inline double sub_dir(double a, double b, bool up) { return add_dir(a, -b, up); }

// Directed product via the fma residual. Exact zero factors stay exact so
// degenerate zero intervals do not leak width.
inline double mul_dir(double a, double b, bool up) {
  if (a == 0.0 || b == 0.0) return 0.0;
  double p = a * b;
  if (!std::isfinite(p)) {
    if (std::isnan(p)) throw DomainError("interval: NaN in multiplication");
    if (up) return p > 0 ? p : -std::numeric_limits<double>::max();
    return p < 0 ? p : std::numeric_limits<double>::max();
  }
  if (std::abs(p) < std::numeric_limits<double>::min()) return widen(p, up);
  double r = std::fma(a, b, -p);
  if (!std::isfinite(r)) return widen(p, up);
  if (up ? r > 0 : r < 0) p = widen(p, up);
  return p;
}

// Directed quotient; the caller guarantees b != 0. The residual q*b - a of a
// correctly rounded quotient is exact, so its sign locates the true value.
inline double div_dir(double a, double b, bool up) {
  if (a == 0.0) return 0.0;
  double q = a / b;
  if (!std::isfinite(q)) {
    if (std::isnan(q)) throw DomainError("interval: NaN in division");
    if (up) return q > 0 ? q : -std::numeric_limits<double>::max();
    return q < 0 ? q : std::numeric_limits<double>::max();
  }
  if (std::abs(q) < std::numeric_limits<double>::min()) return widen(q, up);
  double r = std::fma(q, b, -a);
  if (!std::isfinite(r)) return widen(q, up);
  double high = (b > 0) ? r : -r;
  if (up ? high < 0 : high > 0) q = widen(q, up);
  return q;
}

// Directed x^k for x >= 0, or any x when negation is handled by the caller.
inline double pow_dir_nonneg(double x, unsigned k, bool up) {
  double r = 1.0;
  for (unsigned i = 0; i < k; ++i) r = mul_dir(r, x, up);
  return r;
}

}  // namespace rnd

class Interval {
 public:
  Interval() : lo_(0.0), hi_(0.0) {}
  explicit Interval(double v) : lo_(v), hi_(v) {
    if (std::isnan(v)) throw DomainError("interval: NaN endpoint");
  }
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi)) throw DomainError("interval: NaN endpoint");
    if (lo > hi) throw DomainError("interval: lower endpoint above upper");
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  // Upper bound of the true width.
  double width() const { return rnd::sub_dir(hi_, lo_, true); }

  double midpoint() const {
    double m = 0.5 * (lo_ + hi_);
    if (!std::isfinite(m)) m = 0.5 * lo_ + 0.5 * hi_;
    return std::clamp(m, lo_, hi_);
  }

  // Radius that recovers the interval from the midpoint: mid +- rad covers it.
  double radius() const {
    double m = midpoint();
    return std::max(rnd::sub_dir(m, lo_, true), rnd::sub_dir(hi_, m, true));
  }

  double mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }

  double mig() const {
    if (lo_ <= 0.0 && hi_ >= 0.0) return 0.0;
    return std::min(std::abs(lo_), std::abs(hi_));
  }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool is_degenerate() const { return lo_ == hi_; }
  bool operator==(const Interval& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }
  bool operator!=(const Interval& o) const { return !(*this == o); }

 private:
  double lo_, hi_;
};

inline Interval operator-(const Interval& a) { return Interval(-a.hi(), -a.lo()); }

inline Interval operator+(const Interval& a, const Interval& b) {
  return Interval(rnd::add_dir(a.lo(), b.lo(), false), rnd::add_dir(a.hi(), b.hi(), true));
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return Interval(rnd::sub_dir(a.lo(), b.hi(), false), rnd::sub_dir(a.hi(), b.lo(), true));
}

inline Interval operator*(const Interval& a, const Interval& b) {
  const double cands[4][2] = {{a.lo(), b.lo()}, {a.lo(), b.hi()}, {a.hi(), b.lo()}, {a.hi(), b.hi()}};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    lo = std::min(lo, rnd::mul_dir(c[0], c[1], false));
    hi = std::max(hi, rnd::mul_dir(c[0], c[1], true));
  }
  return Interval(lo, hi);
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains(0.0)) throw DomainError("interval: division by interval containing zero");
  const double cands[4][2] = {{a.lo(), b.lo()}, {a.lo(), b.hi()}, {a.hi(), b.lo()}, {a.hi(), b.hi()}};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    lo = std::min(lo, rnd::div_dir(c[0], c[1], false));
    hi = std::max(hi, rnd::div_dir(c[0], c[1], true));
  }
  return Interval(lo, hi);
}

inline Interval operator+(const Interval& a, double b) { return a + Interval(b); }
inline Interval operator+(double a, const Interval& b) { return Interval(a) + b; }
inline Interval operator-(const Interval& a, double b) { return a - Interval(b); }
inline Interval operator-(double a, const Interval& b) { return Interval(a) - b; }
inline Interval operator*(const Interval& a, double b) { return a * Interval(b); }
inline Interval operator*(double a, const Interval& b) { return Interval(a) * b; }
inline Interval operator/(const Interval& a, double b) { return a / Interval(b); }

inline Interval pow(const Interval& a, unsigned k) {
  if (k == 0) return Interval(1.0);
  if (k == 1) return a;
  if (k % 2 == 1) {
    auto dir = [k](double x, bool up) {
      if (x >= 0.0) return rnd::pow_dir_nonneg(x, k, up);
      return -rnd::pow_dir_nonneg(-x, k, !up);
    };
    return Interval(dir(a.lo(), false), dir(a.hi(), true));
  }
  if (a.lo() >= 0.0)
    return Interval(rnd::pow_dir_nonneg(a.lo(), k, false), rnd::pow_dir_nonneg(a.hi(), k, true));
  if (a.hi() <= 0.0)
    return Interval(rnd::pow_dir_nonneg(-a.hi(), k, false), rnd::pow_dir_nonneg(-a.lo(), k, true));
  return Interval(0.0, rnd::pow_dir_nonneg(std::max(-a.lo(), a.hi()), k, true));
}

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline double width(const Interval& a) { return a.width(); }
inline double midpoint(const Interval& a) { return a.midpoint(); }

inline std::string to_string(const Interval& a) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << a.lo() << ", " << a.hi() << "]";
  return os.str();
}

class IntervalVector {
 public:
  IntervalVector() = default;
  explicit IntervalVector(int n) : v_(static_cast<size_t>(n)) {
    if (n < 0) throw DimensionError("interval vector: negative size");
  }
  explicit IntervalVector(std::vector<Interval> v) : v_(std::move(v)) {}

  static IntervalVector from_center_radius(const Eigen::VectorXd& c, double r) {
    if (r < 0) throw DomainError("interval vector: negative radius");
    std::vector<Interval> v;
    v.reserve(static_cast<size_t>(c.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i)
      v.emplace_back(rnd::sub_dir(c[i], r, false), rnd::add_dir(c[i], r, true));
    return IntervalVector(std::move(v));
  }

  static IntervalVector point(const Eigen::VectorXd& c) {
    std::vector<Interval> v;
    v.reserve(static_cast<size_t>(c.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) v.emplace_back(c[i]);
    return IntervalVector(std::move(v));
  }

  int size() const { return static_cast<int>(v_.size()); }
  const Interval& operator[](int i) const { return v_.at(static_cast<size_t>(i)); }
  Interval& operator[](int i) { return v_.at(static_cast<size_t>(i)); }

  bool contains(const Eigen::VectorXd& x) const {
    if (x.size() != size()) throw DimensionError("interval vector: contains size mismatch");
    for (int i = 0; i < size(); ++i)
      if (!v_[static_cast<size_t>(i)].contains(x[i])) return false;
    return true;
  }

  bool contains(const IntervalVector& o) const {
    if (o.size() != size()) throw DimensionError("interval vector: contains size mismatch");
    for (int i = 0; i < size(); ++i)
      if (!v_[static_cast<size_t>(i)].contains(o[i])) return false;
    return true;
  }

  Eigen::VectorXd midpoint() const {
    Eigen::VectorXd m(size());
    for (int i = 0; i < size(); ++i) m[i] = v_[static_cast<size_t>(i)].midpoint();
    return m;
  }

  double max_width() const {
    double w = 0.0;
    for (const auto& iv : v_) w = std::max(w, iv.width());
    return w;
  }

  int widest_index() const {
    int best = 0;
    double w = -1.0;
    for (int i = 0; i < size(); ++i) {
      double wi = v_[static_cast<size_t>(i)].width();
      if (wi > w) {
        w = wi;
        best = i;
      }
    }
    return best;
  }

  bool operator==(const IntervalVector& o) const { return v_ == o.v_; }

 private:
  std::vector<Interval> v_;
};

inline IntervalVector operator+(const IntervalVector& a, const IntervalVector& b) {
  if (a.size() != b.size()) throw DimensionError("interval vector: size mismatch in +");
  IntervalVector r(a.size());
  for (int i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline IntervalVector operator-(const IntervalVector& a, const IntervalVector& b) {
  if (a.size() != b.size()) throw DimensionError("interval vector: size mismatch in -");
  IntervalVector r(a.size());
  for (int i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline IntervalVector operator-(const IntervalVector& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DimensionError("interval vector: size mismatch in -");
  IntervalVector r(a.size());
  for (int i = 0; i < a.size(); ++i) r[i] = a[i] - Interval(b[i]);
  return r;
}

inline IntervalVector hull(const IntervalVector& a, const IntervalVector& b) {
  if (a.size() != b.size()) throw DimensionError("interval vector: size mismatch in hull");
  IntervalVector r(a.size());
  for (int i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
  return r;
}

inline IntervalVector concat(const IntervalVector& a, const IntervalVector& b) {
  IntervalVector r(a.size() + b.size());
  for (int i = 0; i < a.size(); ++i) r[i] = a[i];
  for (int i = 0; i < b.size(); ++i) r[a.size() + i] = b[i];
  return r;
}

// Rigorous enclosure of M * v for a point matrix and an interval vector.
inline IntervalVector mul(const Eigen::MatrixXd& M, const IntervalVector& v) {
  if (static_cast<int>(M.cols()) != v.size())
    throw DimensionError("interval vector: matrix product size mismatch");
  IntervalVector r(static_cast<int>(M.rows()));
  for (int i = 0; i < M.rows(); ++i) {
    Interval acc(0.0);
    for (int j = 0; j < M.cols(); ++j) acc = acc + Interval(M(i, j)) * v[j];
    r[i] = acc;
  }
  return r;
}

}  // namespace sdcbf
