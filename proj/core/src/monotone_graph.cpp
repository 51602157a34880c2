#include "dnp/monotone_graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dnp/errors.hpp"

namespace dnp {

namespace {

double ulp_tol(double x) { return 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)); }

// Root of phi(s) = target, phi nondecreasing on (lo, hi) with phi(lo+) <= target <= phi(hi-).
// Infinite ends are bracketed by geometric expansion.
double solve_increasing(const std::function<double(double)>& phi, double target, double lo, double hi) {
  double a = lo;
  double b = hi;
  if (!std::isfinite(a)) {
    double x = std::isfinite(b) ? b - 1.0 : 0.0;
    double step = 1.0;
    int guard = 0;
    while (phi(x) > target) {
      x -= step;
      step *= 2.0;
      if (++guard > 2100 || !std::isfinite(x)) throw ConvergenceError("bisection cannot bracket root from below");
    }
    a = x;
  }
  if (!std::isfinite(b)) {
    double x = std::isfinite(lo) ? std::max(a, lo + 1.0) : std::max(a, 0.0);
    double step = 1.0;
    int guard = 0;
    while (phi(x) < target) {
      x += step;
      step *= 2.0;
      if (++guard > 2100 || !std::isfinite(x)) throw ConvergenceError("bisection cannot bracket root from above");
    }
    b = x;
  }
  if (a > b) throw ConvergenceError("inconsistent bisection bracket");
  for (int it = 0; it < 400; ++it) {
    const double tol = std::max(1e-12, ulp_tol(std::max(std::abs(a), std::abs(b))));
    if (b - a <= tol) break;
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (phi(mid) < target) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

double curve_slope(const Segment& seg, double s) {
  if (seg.slope) return seg.slope(s);
  const double h = 1e-6 * std::max(1.0, std::abs(s));
  double lo = s - h;
  double hi = s + h;
  if (lo <= seg.s0) lo = s;
  if (hi >= seg.s1) hi = s;
  if (hi == lo) return 0.0;
  return (seg.value(hi) - seg.value(lo)) / (hi - lo);
}

double curve_inverse(const Segment& seg, double v) {
  if (seg.inverse) return seg.inverse(v);
  if (v <= seg.v0) return seg.s0;
  if (v >= seg.v1) return seg.s1;
  return solve_increasing(seg.value, v, seg.s0, seg.s1);
}

// Maps t in (0, 1) onto the open interval (lo, hi), finite or not.
double interior_point(double lo, double hi, double t) {
  if (std::isfinite(lo) && std::isfinite(hi)) return lo + t * (hi - lo);
  if (std::isfinite(lo)) return lo + t / (1.0 - t);
  if (std::isfinite(hi)) return hi - (1.0 - t) / t;
  return std::tan(M_PI * (t - 0.5));
}

double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

namespace detail {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("adaptive Simpson needs finite bounds");
  // Integrable endpoint singularities (log at the end of its domain) are sampled just inside.
  const double nudge = 1e-14 * (b - a);
  double fa = f(a);
  if (!std::isfinite(fa)) fa = f(a + nudge);
  double fb = f(b);
  if (!std::isfinite(fb)) fb = f(b - nudge);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), 1e-300);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, 48);
}

}  // namespace detail

Segment Segment::horizontal(double s0, double s1, double v) {
  Segment seg;
  seg.kind = Kind::Horizontal;
  seg.s0 = s0;
  seg.s1 = s1;
  seg.v0 = v;
  seg.v1 = v;
  return seg;
}

Segment Segment::vertical(double s, double v0, double v1) {
  Segment seg;
  seg.kind = Kind::Vertical;
  seg.s0 = s;
  seg.s1 = s;
  seg.v0 = v0;
  seg.v1 = v1;
  return seg;
}

MonotoneGraph::MonotoneGraph(std::vector<Segment> segments, std::string name)
    : segments_(std::move(segments)), name_(std::move(name)) {
  for (auto& seg : segments_) {
    if (seg.kind == Segment::Kind::Curve && seg.value && !seg.slope) {
      Segment copy = seg;
      seg.slope = [copy](double s) { return curve_slope(copy, s); };
    }
  }
  validate();
}

void MonotoneGraph::validate() const {
  if (segments_.empty()) throw ParameterError("graph '" + name_ + "' has no segments");
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const Segment& seg = segments_[k];
    switch (seg.kind) {
      case Segment::Kind::Curve: {
        if (!seg.value) throw ParameterError("curve segment without a value map");
        if (!(seg.s0 < seg.s1) || !(seg.v0 < seg.v1))
          throw ParameterError("curve segment must be strictly increasing with s0 < s1 and v0 < v1");
        double prev = seg.v0;
        for (int i = 1; i < 16; ++i) {
          const double s = interior_point(seg.s0, seg.s1, i / 16.0);
          const double v = seg.value(s);
          const double tol = 1e-9 * std::max(1.0, std::abs(v));
          if (std::isnan(v) || v < prev - tol || v < seg.v0 - tol || v > seg.v1 + tol)
            throw ParameterError("graph '" + name_ + "' is not monotone on a curve segment");
          prev = v;
        }
        break;
      }
      case Segment::Kind::Horizontal:
        if (!(seg.s0 < seg.s1) || seg.v0 != seg.v1 || !std::isfinite(seg.v0))
          throw ParameterError("malformed horizontal segment");
        break;
      case Segment::Kind::Vertical:
        if (seg.s0 != seg.s1 || !std::isfinite(seg.s0) || !(seg.v0 < seg.v1))
          throw ParameterError("malformed vertical segment");
        break;
    }
    if (k + 1 < segments_.size()) {
      const Segment& next = segments_[k + 1];
      if (seg.s1 != next.s0 || seg.v1 != next.v0)
        throw ParameterError("graph '" + name_ + "' segments are not connected (maximality fails)");
    }
  }
  const Segment& first = segments_.front();
  const Segment& last = segments_.back();
  if (!(first.s0 == -kInf || first.v0 == -kInf) || !(last.s1 == kInf || last.v1 == kInf))
    throw ParameterError("graph '" + name_ + "' must be unbounded at both ends (maximality fails)");
  if (!eval_set(0.0).contains(0.0)) throw ParameterError("graph '" + name_ + "' violates 0 in beta(0)");
}

Interval MonotoneGraph::eval_set(double s) const {
  Interval out;
  auto include = [&out](double v) {
    out.lo = std::min(out.lo, v);
    out.hi = std::max(out.hi, v);
  };
  for (const Segment& seg : segments_) {
    switch (seg.kind) {
      case Segment::Kind::Vertical:
        if (s == seg.s0) {
          out.lo = std::min(out.lo, seg.v0);
          out.hi = std::max(out.hi, seg.v1);
        }
        break;
      case Segment::Kind::Horizontal:
        if (s >= seg.s0 && s <= seg.s1) include(seg.v0);
        break;
      case Segment::Kind::Curve:
        if (s > seg.s0 && s < seg.s1) {
          include(seg.value(s));
        } else if (s == seg.s0 && std::isfinite(seg.v0)) {
          include(seg.v0);
        } else if (s == seg.s1 && std::isfinite(seg.v1)) {
          include(seg.v1);
        }
        break;
    }
  }
  return out;
}

Interval MonotoneGraph::domain_closure() const { return {segments_.front().s0, segments_.back().s1}; }

Interval MonotoneGraph::range_closure() const { return {segments_.front().v0, segments_.back().v1}; }

bool MonotoneGraph::multivalued() const {
  return std::any_of(segments_.begin(), segments_.end(),
                     [](const Segment& seg) { return seg.kind == Segment::Kind::Vertical; });
}

ResolventPoint MonotoneGraph::resolvent_point(double lambda, double w) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("resolvent needs lambda > 0");
  if (std::isnan(w)) throw ParameterError("resolvent argument is NaN");
  for (const Segment& seg : segments_) {
    const double w0 = seg.s0 + lambda * seg.v0;
    const double w1 = seg.s1 + lambda * seg.v1;
    if (!(w0 <= w && w <= w1)) continue;
    ResolventPoint rp;
    switch (seg.kind) {
      case Segment::Kind::Vertical:
        rp.s = seg.s0;
        rp.v = (w - seg.s0) / lambda;
        rp.v = std::clamp(rp.v, seg.v0, seg.v1);
        rp.dv = 1.0 / lambda;
        break;
      case Segment::Kind::Horizontal:
        rp.s = std::clamp(w - lambda * seg.v0, seg.s0, seg.s1);
        rp.v = seg.v0;
        rp.dv = 0.0;
        break;
      case Segment::Kind::Curve: {
        double s;
        if (seg.resolve) {
          s = seg.resolve(lambda, w);
        } else {
          const auto phi = [&seg, lambda](double x) { return x + lambda * seg.value(x); };
          s = solve_increasing(phi, w, seg.s0, seg.s1);
          // Newton polish keeps the bisection answer when a step leaves the segment.
          for (int it = 0; it < 4; ++it) {
            const double d = 1.0 + lambda * seg.slope(s);
            if (!std::isfinite(d) || d <= 0.0) break;
            const double next = s - (phi(s) - w) / d;
            if (!(next > seg.s0 && next < seg.s1) || next == s) break;
            s = next;
          }
        }
        s = std::clamp(s, seg.s0, seg.s1);
        rp.s = s;
        const double fp = (s > seg.s0 && s < seg.s1) ? seg.slope(s) : kInf;
        if (std::isfinite(fp) && lambda * fp <= 1.0 && s > seg.s0 && s < seg.s1) {
          rp.v = seg.value(s);
        } else {
          rp.v = (w - s) / lambda;
        }
        rp.v = std::clamp(rp.v, seg.v0, seg.v1);
        rp.dv = std::isfinite(fp) ? fp / (1.0 + lambda * fp) : 1.0 / lambda;
        break;
      }
    }
    if (w == 0.0) {
      rp.s = 0.0;
      rp.v = 0.0;
    }
    return rp;
  }
  throw ConvergenceError("resolvent of graph '" + name_ + "' found no segment (graph not maximal)");
}

double MonotoneGraph::resolvent(double lambda, double v) const { return resolvent_point(lambda, v).s; }

double MonotoneGraph::yosida(double lambda, double s) const { return resolvent_point(lambda, s).v; }

double MonotoneGraph::yosida_slope(double lambda, double s) const { return resolvent_point(lambda, s).dv; }

double MonotoneGraph::minimal_section(double s) const {
  const Interval set = eval_set(s);
  if (set.empty()) throw DomainError("minimal section requested outside D(beta) of graph '" + name_ + "'");
  return set.clamp(0.0);
}

double MonotoneGraph::integrate_curve(const Segment& seg, double a, double b) const {
  if (seg.antiderivative) return seg.antiderivative(b) - seg.antiderivative(a);
  return detail::adaptive_simpson(seg.value, a, b);
}

double MonotoneGraph::integrate_curve_inverse(const Segment& seg, double a, double b) const {
  if (seg.inverse_antiderivative) return seg.inverse_antiderivative(b) - seg.inverse_antiderivative(a);
  const double sa = curve_inverse(seg, a);
  const double sb = curve_inverse(seg, b);
  if (seg.antiderivative && std::isfinite(sa) && std::isfinite(sb)) {
    // Legendre: integral of the inverse from its primitive.
    return (b * sb - seg.antiderivative(sb)) - (a * sa - seg.antiderivative(sa));
  }
  return detail::adaptive_simpson([&seg](double v) { return curve_inverse(seg, v); }, a, b);
}

double MonotoneGraph::primitive(double s) const {
  if (std::isnan(s)) throw ParameterError("primitive argument is NaN");
  const Interval dom = domain_closure();
  if (s < dom.lo || s > dom.hi) return kInf;
  if (s == 0.0) return 0.0;
  const double a = std::min(0.0, s);
  const double b = std::max(0.0, s);
  double total = 0.0;
  for (const Segment& seg : segments_) {
    const double lo = std::max(a, seg.s0);
    const double hi = std::min(b, seg.s1);
    if (!(lo < hi)) continue;
    if (seg.kind == Segment::Kind::Horizontal) {
      total += seg.v0 * (hi - lo);
    } else if (seg.kind == Segment::Kind::Curve) {
      total += integrate_curve(seg, lo, hi);
    }
  }
  const double j = s > 0.0 ? total : -total;
  return std::max(j, 0.0);
}

double MonotoneGraph::moreau_envelope(double lambda, double s) const {
  const ResolventPoint rp = resolvent_point(lambda, s);
  return 0.5 * lambda * rp.v * rp.v + primitive(rp.s);
}

double MonotoneGraph::conjugate(double v) const {
  if (std::isnan(v)) throw ParameterError("conjugate argument is NaN");
  const Interval range = range_closure();
  if (v < range.lo || v > range.hi) return kInf;
  if (v == 0.0) return 0.0;
  const double a = std::min(0.0, v);
  const double b = std::max(0.0, v);
  double total = 0.0;
  for (const Segment& seg : segments_) {
    const double lo = std::max(a, seg.v0);
    const double hi = std::min(b, seg.v1);
    if (!(lo < hi)) continue;
    if (seg.kind == Segment::Kind::Vertical) {
      total += seg.s0 * (hi - lo);
    } else if (seg.kind == Segment::Kind::Curve) {
      total += integrate_curve_inverse(seg, lo, hi);
    }
  }
  const double js = v > 0.0 ? total : -total;
  return std::max(js, 0.0);
}

BgPair MonotoneGraph::bg_pair(double v) const {
  BgPair out;
  // b and g both lie between 0 and v, so snapping b to the spacing of doubles near v makes
  // v - b exact and b + g == v holds bit for bit.
  const double b = resolvent(1.0, v);
  const double a = std::abs(v);
  if (a == 0.0 || !std::isfinite(a)) {
    out.b = b;
    out.g = v - b;
    return out;
  }
  const double q = std::nextafter(a, kInf) - a;
  out.b = std::nearbyint(b / q) * q;
  out.g = v - out.b;
  return out;
}

double MonotoneGraph::membership_defect(double s, double v) const {
  if (!std::isfinite(s) || !std::isfinite(v)) return kInf;
  return std::abs(s - resolvent(1.0, s + v));
}

MonotoneGraph MonotoneGraph::inverse() const {
  std::vector<Segment> out;
  out.reserve(segments_.size());
  for (const Segment& seg : segments_) {
    switch (seg.kind) {
      case Segment::Kind::Horizontal:
        out.push_back(Segment::vertical(seg.v0, seg.s0, seg.s1));
        break;
      case Segment::Kind::Vertical:
        out.push_back(Segment::horizontal(seg.v0, seg.v1, seg.s0));
        break;
      case Segment::Kind::Curve: {
        Segment inv;
        inv.kind = Segment::Kind::Curve;
        inv.s0 = seg.v0;
        inv.s1 = seg.v1;
        inv.v0 = seg.s0;
        inv.v1 = seg.s1;
        const Segment copy = seg;
        inv.value = [copy](double v) { return curve_inverse(copy, v); };
        inv.slope = [copy](double v) {
          const double d = copy.slope(curve_inverse(copy, v));
          return d > 0.0 ? 1.0 / d : kInf;
        };
        inv.inverse = seg.value;
        inv.antiderivative = seg.inverse_antiderivative;
        inv.inverse_antiderivative = seg.antiderivative;
        out.push_back(std::move(inv));
        break;
      }
    }
  }
  return MonotoneGraph(std::move(out), name_ + "^-1");
}

}  // namespace dnp
