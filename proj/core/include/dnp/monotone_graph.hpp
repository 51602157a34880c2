#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dnp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed real interval [lo, hi]; infinite ends encode rays. Empty when lo > hi.
struct Interval {
  double lo = kInf;
  double hi = -kInf;

  bool empty() const { return lo > hi; }
  bool contains(double v, double tol = 0.0) const { return !empty() && v >= lo - tol && v <= hi + tol; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

/// One piece of a maximal monotone graph, read as a curve in the (s, v) plane
/// that runs from the lower-left end of the graph to the upper-right end.
///
/// A Curve is a continuous strictly increasing map v = value(s) on the open
/// interval (s0, s1) with limits v0, v1 at the ends. A Horizontal piece is the
/// flat span v = v0 over (s0, s1). A Vertical piece is the multi-valued point
/// s = s0 with values [v0, v1]; infinite v-ends encode domain walls.
///
/// Optional callables give closed forms; when absent the graph falls back to
/// bisection (inverse, resolvent) or adaptive Simpson quadrature (primitives).
struct Segment {
  enum class Kind { Curve, Horizontal, Vertical };

  Kind kind = Kind::Curve;
  double s0 = 0.0, s1 = 0.0;
  double v0 = 0.0, v1 = 0.0;

  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::function<double(double)> antiderivative;          // F' = value
  std::function<double(double)> inverse;                 // value^{-1}
  std::function<double(double)> inverse_antiderivative;  // G' = inverse
  std::function<double(double, double)> resolve;         // s + lambda*value(s) = w

  static Segment horizontal(double s0, double s1, double v);
  static Segment vertical(double s, double v0, double v1);
};

/// Point of the graph reached by the resolvent: s = J_lambda(w), v = beta_lambda(w) in beta(s),
/// and dv the (left) derivative of the Yosida approximation at w.
struct ResolventPoint {
  double s = 0.0;
  double v = 0.0;
  double dv = 0.0;
};

/// Decomposition v = b(v) + g(v) with g(v) in beta(b(v)).
struct BgPair {
  double b = 0.0;
  double g = 0.0;
};

/// Maximal monotone graph beta in R x R with 0 in beta(0). Immutable.
class MonotoneGraph {
 public:
  MonotoneGraph(std::vector<Segment> segments, std::string name = "custom");

  const std::string& name() const { return name_; }
  const std::vector<Segment>& segments() const { return segments_; }

  /// Value set beta(s); empty when s is outside D(beta).
  Interval eval_set(double s) const;

  /// Closure of D(beta) and of R(beta).
  Interval domain_closure() const;
  Interval range_closure() const;

  /// True when some beta(s) is a nondegenerate interval.
  bool multivalued() const;

  double resolvent(double lambda, double v) const;
  ResolventPoint resolvent_point(double lambda, double v) const;
  double yosida(double lambda, double s) const;
  double yosida_slope(double lambda, double s) const;

  /// Element of beta(s) of least magnitude. Throws DomainError outside D(beta).
  double minimal_section(double s) const;

  /// Convex primitive j with j(0) = 0, beta = dj; +inf outside the closure of D(beta).
  double primitive(double s) const;

  /// Moreau envelope j_lambda(s) = min_r |s - r|^2 / (2 lambda) + j(r).
  double moreau_envelope(double lambda, double s) const;

  /// Fenchel conjugate j*(v) = sup_s (s v - j(s)).
  double conjugate(double v) const;

  BgPair bg_pair(double v) const;

  /// Reflection across the diagonal.
  MonotoneGraph inverse() const;

  /// Distance of (s, v) to the graph measured along the anti-diagonal: |s - b(s + v)|.
  double membership_defect(double s, double v) const;

 private:
  void validate() const;
  double integrate_curve(const Segment& seg, double a, double b) const;
  double integrate_curve_inverse(const Segment& seg, double a, double b) const;

  std::vector<Segment> segments_;
  std::string name_;
};

/// beta(s) = s.
MonotoneGraph make_identity();
/// beta(s) = |s|^{r-2} s, r > 1.
MonotoneGraph make_power(double r);
/// beta(s) = e^s - 1.
MonotoneGraph make_exponential();
/// beta(s) = log(1 + s) on (-1, inf).
MonotoneGraph make_logarithm();
MonotoneGraph make_sign();
MonotoneGraph make_heaviside();
/// Subdifferential of the indicator of [m, M], m <= 0 <= M.
MonotoneGraph make_indicator(double m, double M);

/// Generic piecewise graph: pieces[k] lives on (breakpoints[k-1], breakpoints[k]),
/// the outer pieces extend to the domain ends (infinite unless a closed wall is
/// requested through domain_lo / domain_hi). Each piece must be constant or
/// strictly increasing; jumps at breakpoints are the gaps between one-sided limits.
struct PiecewiseSpec {
  std::vector<double> breakpoints;
  std::vector<std::function<double(double)>> pieces;
  std::vector<std::optional<Interval>> jumps;  // optional per breakpoint, checked against the limits
  double domain_lo = -kInf;
  double domain_hi = kInf;
};
MonotoneGraph make_piecewise(const PiecewiseSpec& spec, std::string name = "piecewise");

namespace detail {
/// Adaptive Simpson quadrature on a finite interval.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10);
}  // namespace detail

}  // namespace dnp
