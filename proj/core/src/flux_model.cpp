#include "dnp/flux_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "dnp/errors.hpp"
#include "dnp/random.hpp"

namespace dnp {

namespace {

void check_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << "flux exponent must lie in (1, inf), got " << p;
    throw ParameterError(msg.str());
  }
}

double power_potential(double p, const Vec2& z) { return std::pow(norm(z), p) / p; }

Vec2 power_flux(double p, const Vec2& z) {
  const double r = norm(z);
  if (r == 0.0) return {0.0, 0.0};
  const double f = std::pow(r, p - 2.0);
  return {f * z[0], f * z[1]};
}

Sym2 power_jacobian(double p, const Vec2& z, double floor) {
  if (p == 2.0) return {1.0, 0.0, 1.0};
  const double r = norm(z);
  const double rf = std::max(r, floor);
  const double f = std::pow(rf, p - 2.0);
  if (r == 0.0) return {f, 0.0, f};
  const double nx = z[0] / r;
  const double ny = z[1] / r;
  return {f * (1.0 + (p - 2.0) * nx * nx), f * (p - 2.0) * nx * ny, f * (1.0 + (p - 2.0) * ny * ny)};
}

double largest_dyadic_at_most(double bound) {
  double c = 1.0;
  while (c > bound) c *= 0.5;
  return c;
}

// Inequality lhs >= rhs, normalized.
double margin(double lhs, double rhs) { return (lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}); }

}  // namespace

double p_laplacian_monotonicity_constant(double p) {
  check_exponent(p);
  // The lower growth bound c|z|^p - C <= |z|^p / p caps c at 1/p.
  if (p >= 2.0) return std::min(std::pow(2.0, 2.0 - p), 1.0 / p);
  return largest_dyadic_at_most(std::min(p - 1.0, 1.0 / p));
}

FluxModel make_p_laplacian(double p) {
  check_exponent(p);
  FluxModel m;
  std::ostringstream name;
  name << "p_laplacian(" << p << ")";
  m.name = name.str();
  m.p = p;
  m.c = p_laplacian_monotonicity_constant(p);
  m.C = 1.0;
  m.x_independent = true;
  m.potential = [p](const Point&, const Vec2& z) { return power_potential(p, z); };
  m.flux = [p](const Point&, const Vec2& z) { return power_flux(p, z); };
  m.jacobian = [p](const Point&, const Vec2& z, double floor) { return power_jacobian(p, z, floor); };
  return m;
}

FluxModel make_sum_p_laplacian(const std::vector<double>& ps) {
  if (ps.empty()) throw ParameterError("sum of p-Laplacians needs at least one exponent");
  for (double p : ps) check_exponent(p);
  if (ps.size() == 1) return make_p_laplacian(ps.front());
  const double pmax = *std::max_element(ps.begin(), ps.end());
  FluxModel m;
  std::ostringstream name;
  name << "sum_p_laplacian(";
  for (std::size_t i = 0; i < ps.size(); ++i) name << (i ? "," : "") << ps[i];
  name << ")";
  m.name = name.str();
  m.p = pmax;
  m.c = p_laplacian_monotonicity_constant(pmax);
  m.C = static_cast<double>(ps.size());
  m.x_independent = true;
  m.potential = [ps](const Point&, const Vec2& z) {
    double a = 0.0;
    for (double p : ps) a += power_potential(p, z);
    return a;
  };
  m.flux = [ps](const Point&, const Vec2& z) {
    Vec2 out{0.0, 0.0};
    for (double p : ps) {
      const Vec2 f = power_flux(p, z);
      out[0] += f[0];
      out[1] += f[1];
    }
    return out;
  };
  m.jacobian = [ps](const Point&, const Vec2& z, double floor) {
    Sym2 out{0.0, 0.0, 0.0};
    for (double p : ps) {
      const Sym2 j = power_jacobian(p, z, floor);
      for (int k = 0; k < 3; ++k) out[k] += j[k];
    }
    return out;
  };
  return m;
}

FluxModel make_weighted_p_laplacian(double p, std::function<double(const Point&)> weight, double w_min, double w_max) {
  check_exponent(p);
  if (!weight) throw ParameterError("weighted p-Laplacian needs a weight function");
  if (!(w_min > 0.0) || !(w_max >= w_min) || !std::isfinite(w_max))
    throw ParameterError("weighted p-Laplacian needs 0 < w_min <= w_max < inf");
  FluxModel m;
  std::ostringstream name;
  name << "weighted_p_laplacian(" << p << ")";
  m.name = name.str();
  m.p = p;
  m.c = p_laplacian_monotonicity_constant(p) * w_min;
  m.C = std::max(1.0, w_max);
  m.x_independent = false;
  auto w = std::make_shared<std::function<double(const Point&)>>(std::move(weight));
  m.potential = [p, w](const Point& x, const Vec2& z) { return (*w)(x)*power_potential(p, z); };
  m.flux = [p, w](const Point& x, const Vec2& z) {
    const double wx = (*w)(x);
    const Vec2 f = power_flux(p, z);
    return Vec2{wx * f[0], wx * f[1]};
  };
  m.jacobian = [p, w](const Point& x, const Vec2& z, double floor) {
    const double wx = (*w)(x);
    Sym2 j = power_jacobian(p, z, floor);
    for (double& e : j) e *= wx;
    return j;
  };
  return m;
}

const AuditCheck& FluxAudit::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw PreconditionError("no audit check named " + name);
}

FluxAudit verify_hypotheses(const FluxModel& model, std::size_t sample_count, std::uint64_t seed, int dim) {
  if (sample_count < 1) throw ParameterError("audit needs at least one sample");
  if (dim != 1 && dim != 2) throw ParameterError("audit dimension must be 1 or 2");
  Rng rng(seed);
  const double p = model.p;
  const double c = model.c;
  const double C = model.C;

  auto random_vec = [&](double lo_exp, double hi_exp) {
    const double mag = std::pow(10.0, rng.uniform(lo_exp, hi_exp));
    if (dim == 1) return Vec2{rng.uniform() < 0.5 ? -mag : mag, 0.0};
    const double th = rng.uniform(0.0, 2.0 * M_PI);
    return Vec2{mag * std::cos(th), mag * std::sin(th)};
  };

  std::vector<AuditCheck> checks(7);
  const char* names[] = {"growth_lower", "growth_upper", "flux_bound", "anchoring",
                         "monotonicity", "gradient_consistency", "convexity"};
  for (int k = 0; k < 7; ++k) {
    checks[k].name = names[k];
    checks[k].worst_margin = std::numeric_limits<double>::infinity();
    checks[k].worst_ratio = std::numeric_limits<double>::infinity();
  }
  auto record = [](AuditCheck& chk, std::size_t i, double m, const Point& x, const Vec2& z1, const Vec2& z2,
                   double fail_below) {
    ++chk.samples;
    if (m < chk.worst_margin) {
      chk.worst_margin = m;
      chk.witness_x = x;
      chk.witness_z1 = z1;
      chk.witness_z2 = z2;
    }
    if (m < fail_below && chk.pass) {
      chk.pass = false;
      chk.first_failure = i;
    }
  };
  constexpr double kRound = -1e-12;

  for (std::size_t i = 0; i < sample_count; ++i) {
    const Point x{rng.uniform(), dim == 2 ? rng.uniform() : 0.0};
    const Vec2 z1 = random_vec(-3.0, 3.0);
    Vec2 z2;
    if (i % 2 == 0) {
      z2 = random_vec(-3.0, 3.0);
    } else {
      const Vec2 d = random_vec(-3.0, 0.0);
      const double s = norm(z1);
      z2 = {z1[0] + s * d[0], z1[1] + s * d[1]};
    }
    const double r1 = norm(z1);
    const double a1 = model.potential(x, z1);
    const Vec2 f1 = model.flux(x, z1);
    const Vec2 f2 = model.flux(x, z2);

    record(checks[0], i, margin(a1, c * std::pow(r1, p) - C), x, z1, z1, kRound);
    record(checks[1], i, margin(C * (std::pow(r1, p) + 1.0), a1), x, z1, z1, kRound);
    record(checks[2], i, margin(C * (std::pow(r1, p - 1.0) + 1.0), norm(f1)), x, z1, z1, kRound);

    const Vec2 f0 = model.flux(x, Vec2{0.0, 0.0});
    record(checks[3], i, -norm(f0), x, Vec2{0.0, 0.0}, Vec2{0.0, 0.0}, 0.0);

    const Vec2 dz{z1[0] - z2[0], z1[1] - z2[1]};
    const double lhs = dot(Vec2{f1[0] - f2[0], f1[1] - f2[1]}, dz);
    const double rdz = norm(dz);
    double shape;
    if (p >= 2.0) {
      shape = std::pow(rdz, p);
    } else {
      shape = rdz * rdz / (std::pow(r1, 2.0 - p) + std::pow(norm(z2), 2.0 - p) + C);
    }
    record(checks[4], i, margin(lhs, c * shape), x, z1, z2, kRound);
    if (shape > 0.0) checks[4].worst_ratio = std::min(checks[4].worst_ratio, lhs / shape);

    // Central differences of the potential away from z = 0.
    if (r1 >= 1e-2) {
      double worst = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double h = 1e-6 * std::max(1.0, r1);
        Vec2 zp = z1;
        Vec2 zm = z1;
        zp[k] += h;
        zm[k] -= h;
        const double fd = (model.potential(x, zp) - model.potential(x, zm)) / (2.0 * h);
        const double rel = std::abs(fd - f1[k]) / std::max(norm(f1), 1e-300);
        worst = std::max(worst, rel);
      }
      record(checks[5], i, 1e-6 - worst, x, z1, z1, 0.0);
      checks[5].worst_ratio = std::min(checks[5].worst_ratio, -worst);
    }

    // Convexity along the segment [z1, z2].
    const Vec2 zm{0.5 * (z1[0] + z2[0]), 0.5 * (z1[1] + z2[1])};
    const double a2 = model.potential(x, z2);
    record(checks[6], i, margin(0.5 * (a1 + a2), model.potential(x, zm)), x, z1, z2, -1e-12);
  }

  FluxAudit audit;
  audit.model = model.name;
  for (auto& chk : checks) {
    if (chk.worst_ratio == std::numeric_limits<double>::infinity()) chk.worst_ratio = 0.0;
    audit.pass = audit.pass && chk.pass;
  }
  // gradient_consistency stores the negated worst relative error; report it positive.
  checks[5].worst_ratio = -checks[5].worst_ratio;
  audit.checks = std::move(checks);
  return audit;
}

}  // namespace dnp
