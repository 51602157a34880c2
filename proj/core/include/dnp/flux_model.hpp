#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dnp {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Gradient-space vector. One-dimensional problems leave the second slot at zero.
using Vec2 = std::array<double, 2>;

/// Symmetric 2x2 matrix stored as (xx, xy, yy).
using Sym2 = std::array<double, 3>;

inline double norm(const Vec2& z) { return std::hypot(z[0], z[1]); }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

/// Convex potential a(x, z) and its gradient alpha(x, z) = D_z a(x, z), together
/// with the exponent p and a pair of constants (c, C) for which the growth,
/// flux-bound and strong-monotonicity hypotheses hold.
struct FluxModel {
  std::string name;
  double p = 2.0;
  double c = 1.0;
  double C = 1.0;
  bool x_independent = true;

  std::function<double(const Point&, const Vec2&)> potential;
  std::function<Vec2(const Point&, const Vec2&)> flux;
  /// Hessian D_z alpha with |z| floored at `floor` inside singular or degenerate factors.
  std::function<Sym2(const Point&, const Vec2&, double floor)> jacobian;
};

/// a(x, z) = |z|^p / p.
FluxModel make_p_laplacian(double p);

/// a(x, z) = sum_i |z|^{p_i} / p_i; exponent max p_i.
FluxModel make_sum_p_laplacian(const std::vector<double>& ps);

/// a(x, z) = w(x) |z|^p / p with w_min <= w <= w_max, w_min > 0.
FluxModel make_weighted_p_laplacian(double p, std::function<double(const Point&)> weight, double w_min, double w_max);

/// Strong monotonicity constant valid for the pure p-Laplacian and compatible with the lower growth bound.
double p_laplacian_monotonicity_constant(double p);

struct AuditCheck {
  std::string name;
  bool pass = true;
  double worst_margin = 0.0;  // normalized (lhs - rhs) / max(1, |lhs|, |rhs|); >= 0 when the inequality holds
  double worst_ratio = 0.0;   // empirical constant where meaningful (monotonicity: lhs / rhs-without-c)
  std::size_t samples = 0;
  std::size_t first_failure = 0;  // sample index, meaningful only when !pass
  Point witness_x;
  Vec2 witness_z1{0.0, 0.0};
  Vec2 witness_z2{0.0, 0.0};
};

struct FluxAudit {
  std::string model;
  bool pass = true;
  std::vector<AuditCheck> checks;

  const AuditCheck& check(const std::string& name) const;
};

/// Deterministic randomized audit of the growth, flux-bound, anchoring, strong
/// monotonicity and gradient-consistency hypotheses. Samples x in [0,1]^dim and
/// |z| log-uniform in [1e-3, 1e3]. A failing model yields a failing report.
FluxAudit verify_hypotheses(const FluxModel& model, std::size_t sample_count, std::uint64_t seed, int dim = 2);

}  // namespace dnp
