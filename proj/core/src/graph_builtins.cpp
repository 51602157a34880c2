#include <cmath>
#include <string>
#include <utility>

#include "dnp/errors.hpp"
#include "dnp/monotone_graph.hpp"

namespace dnp {

namespace {

double signed_pow(double s, double e) { return std::copysign(std::pow(std::abs(s), e), s); }

// x log x with the continuous value 0 at x = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Root of s + lambda s^3 = w via Cardano, polished by Newton.
double cubic_resolvent(double lambda, double w) {
  if (w == 0.0) return 0.0;
  const double aw = std::abs(w);
  const double p = 1.0 / lambda;
  const double half_q = aw / (2.0 * lambda);
  const double t = std::cbrt(half_q + std::sqrt(half_q * half_q + p * p * p / 27.0));
  double s = t - p / (3.0 * t);
  if (!(s > 0.0)) s = aw;
  for (int it = 0; it < 3; ++it) {
    const double r = s + lambda * s * s * s - aw;
    const double d = 1.0 + 3.0 * lambda * s * s;
    s -= r / d;
  }
  return std::copysign(s, w);
}

}  // namespace

MonotoneGraph make_identity() {
  Segment seg;
  seg.kind = Segment::Kind::Curve;
  seg.s0 = -kInf;
  seg.s1 = kInf;
  seg.v0 = -kInf;
  seg.v1 = kInf;
  seg.value = [](double s) { return s; };
  seg.slope = [](double) { return 1.0; };
  seg.antiderivative = [](double s) { return 0.5 * s * s; };
  seg.inverse = [](double v) { return v; };
  seg.inverse_antiderivative = [](double v) { return 0.5 * v * v; };
  seg.resolve = [](double lambda, double w) { return w / (1.0 + lambda); };
  return MonotoneGraph({seg}, "identity");
}

MonotoneGraph make_power(double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ParameterError("power graph needs r > 1, got " + std::to_string(r));
  if (r == 2.0) {
    MonotoneGraph id = make_identity();
    return MonotoneGraph(id.segments(), "power(2)");
  }
  const double k = r - 1.0;
  const double rc = r / (r - 1.0);
  Segment seg;
  seg.kind = Segment::Kind::Curve;
  seg.s0 = -kInf;
  seg.s1 = kInf;
  seg.v0 = -kInf;
  seg.v1 = kInf;
  seg.value = [k](double s) { return signed_pow(s, k); };
  seg.slope = [k](double s) { return s == 0.0 ? (k < 1.0 ? kInf : (k == 1.0 ? 1.0 : 0.0)) : k * std::pow(std::abs(s), k - 1.0); };
  seg.antiderivative = [r](double s) { return std::pow(std::abs(s), r) / r; };
  seg.inverse = [k](double v) { return signed_pow(v, 1.0 / k); };
  seg.inverse_antiderivative = [rc](double v) { return std::pow(std::abs(v), rc) / rc; };
  if (k == 2.0) {
    seg.resolve = [](double lambda, double w) {
      const double aw = std::abs(w);
      return std::copysign(2.0 * aw / (1.0 + std::sqrt(1.0 + 4.0 * lambda * aw)), w);
    };
  } else if (k == 3.0) {
    seg.resolve = cubic_resolvent;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "power(%g)", r);
  return MonotoneGraph({seg}, buf);
}

MonotoneGraph make_exponential() {
  Segment seg;
  seg.kind = Segment::Kind::Curve;
  seg.s0 = -kInf;
  seg.s1 = kInf;
  seg.v0 = -1.0;
  seg.v1 = kInf;
  seg.value = [](double s) { return std::expm1(s); };
  seg.slope = [](double s) { return std::exp(s); };
  seg.antiderivative = [](double s) { return std::expm1(s) - s; };
  seg.inverse = [](double v) { return std::log1p(v); };
  seg.inverse_antiderivative = [](double v) { return xlogx(1.0 + v) - v; };
  return MonotoneGraph({seg}, "exponential");
}

MonotoneGraph make_logarithm() {
  MonotoneGraph inv = make_exponential().inverse();
  return MonotoneGraph(inv.segments(), "logarithm");
}

MonotoneGraph make_sign() {
  return MonotoneGraph({Segment::horizontal(-kInf, 0.0, -1.0), Segment::vertical(0.0, -1.0, 1.0),
                        Segment::horizontal(0.0, kInf, 1.0)},
                       "sign");
}

MonotoneGraph make_heaviside() {
  return MonotoneGraph({Segment::horizontal(-kInf, 0.0, 0.0), Segment::vertical(0.0, 0.0, 1.0),
                        Segment::horizontal(0.0, kInf, 1.0)},
                       "heaviside");
}

MonotoneGraph make_indicator(double m, double M) {
  if (!std::isfinite(m) || !std::isfinite(M) || m > 0.0 || M < 0.0)
    throw ParameterError("indicator graph needs finite m <= 0 <= M");
  if (m == M) return MonotoneGraph({Segment::vertical(0.0, -kInf, kInf)}, "indicator");
  return MonotoneGraph({Segment::vertical(m, -kInf, 0.0), Segment::horizontal(m, M, 0.0), Segment::vertical(M, 0.0, kInf)},
                       "indicator");
}

MonotoneGraph make_piecewise(const PiecewiseSpec& spec, std::string name) {
  const auto& bp = spec.breakpoints;
  if (spec.pieces.size() != bp.size() + 1)
    throw ParameterError("piecewise graph needs one more piece than breakpoints");
  if (!spec.jumps.empty() && spec.jumps.size() != bp.size())
    throw ParameterError("piecewise graph jump list must match the breakpoints");
  for (std::size_t k = 0; k + 1 < bp.size(); ++k)
    if (!(bp[k] < bp[k + 1])) throw ParameterError("piecewise breakpoints must be strictly increasing");
  if (!bp.empty() && (spec.domain_lo >= bp.front() || spec.domain_hi <= bp.back()))
    throw ParameterError("piecewise domain must contain every breakpoint");
  if (!(spec.domain_lo < spec.domain_hi)) throw ParameterError("piecewise domain is empty");

  std::vector<Segment> segs;
  auto limit = [](const std::function<double(double)>& f, double s) {
    const double v = f(s);
    if (std::isnan(v)) throw ParameterError("piecewise piece has no limit at " + std::to_string(s));
    return v;
  };

  double first_v = 0.0;
  for (std::size_t k = 0; k < spec.pieces.size(); ++k) {
    const double lo = k == 0 ? spec.domain_lo : bp[k - 1];
    const double hi = k == bp.size() ? spec.domain_hi : bp[k];
    const auto& f = spec.pieces[k];
    const double vlo = limit(f, lo);
    const double vhi = limit(f, hi);
    if (k == 0) first_v = vlo;
    if (k > 0) {
      const double prev_hi = segs.back().v1;
      if (vlo < prev_hi) throw ParameterError("piecewise graph decreases at breakpoint " + std::to_string(lo));
      if (!spec.jumps.empty() && spec.jumps[k - 1]) {
        const Interval& j = *spec.jumps[k - 1];
        const double tol = 1e-12 * std::max(1.0, std::abs(j.hi) + std::abs(j.lo));
        if (std::abs(j.lo - prev_hi) > tol || std::abs(j.hi - vlo) > tol)
          throw ParameterError("jump interval at breakpoint " + std::to_string(lo) +
                               " does not match the one-sided limits (maximality)");
      }
      if (vlo > prev_hi) segs.push_back(Segment::vertical(lo, prev_hi, vlo));
    }
    // Constant pieces become flat spans, everything else must be strictly increasing.
    bool flat = vlo == vhi;
    for (int i = 1; flat && i < 8; ++i) {
      const double s = std::isfinite(lo) && std::isfinite(hi) ? lo + (hi - lo) * i / 8.0
                                                              : (std::isfinite(lo) ? lo + i : (std::isfinite(hi) ? hi - i : i - 4.0));
      flat = f(s) == vlo;
    }
    if (flat) {
      segs.push_back(Segment::horizontal(lo, hi, vlo));
    } else {
      Segment seg;
      seg.kind = Segment::Kind::Curve;
      seg.s0 = lo;
      seg.s1 = hi;
      seg.v0 = vlo;
      seg.v1 = vhi;
      seg.value = f;
      segs.push_back(std::move(seg));
    }
  }
  if (std::isfinite(spec.domain_lo)) segs.insert(segs.begin(), Segment::vertical(spec.domain_lo, -kInf, first_v));
  if (std::isfinite(spec.domain_hi)) segs.push_back(Segment::vertical(spec.domain_hi, segs.back().v1, kInf));
  return MonotoneGraph(std::move(segs), std::move(name));
}

}  // namespace dnp
