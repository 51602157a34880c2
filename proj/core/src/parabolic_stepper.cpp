#include "dnp/parabolic_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnp/errors.hpp"

namespace dnp {

namespace {

std::string q_tag(double q) { return "[q=" + format_real(q) + "]"; }

std::vector<double> default_q(const FluxModel& flux, const std::vector<double>& qs) {
  if (!qs.empty()) return qs;
  return {1.0, flux.p / (flux.p - 1.0), 2.0, kInf};
}

double measure_power(const Mesh& m, double q) { return std::isinf(q) ? 1.0 : std::pow(m.measure(), 1.0 / q); }

// Sum over interior nodes of vol * j*(xi), with xi projected onto the closure of the range of beta
// so that round-off at a finite range end does not produce +inf.
double conjugate_mass(const MonotoneGraph& beta, const DiscreteField& xi) {
  const Interval range = beta.range_closure();
  double s = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (xi.mesh.on_boundary(k)) continue;
    s += xi.mesh.volume(k) * beta.conjugate(range.clamp(xi[k]));
  }
  return s;
}

}  // namespace

Forcing Forcing::closed_form(std::function<double(const Point&, double)> f) {
  Forcing out;
  out.expr_ = std::move(f);
  return out;
}

Forcing Forcing::sampled(std::vector<double> times, std::vector<DiscreteField> fields) {
  if (times.empty() || times.size() != fields.size()) throw ParameterError("sampled forcing needs one field per time");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ParameterError("forcing sample times must be strictly increasing");
  for (std::size_t k = 1; k < fields.size(); ++k) check_same_mesh(fields[0].mesh, fields[k].mesh, "forcing samples");
  Forcing out;
  out.times_ = std::move(times);
  out.samples_ = std::move(fields);
  return out;
}

DiscreteField Forcing::at(const Mesh& m, double t) const {
  DiscreteField out(m);
  if (expr_) {
    for (std::size_t k = 0; k < m.size(); ++k)
      if (!m.on_boundary(k)) out.values[k] = expr_(m.node(k), t);
    return out;
  }
  if (samples_.empty()) return out;
  check_same_mesh(m, samples_.front().mesh, "forcing");
  std::size_t hi = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  if (hi == 0) {
    out = samples_.front();
  } else if (hi == times_.size()) {
    out = samples_.back();
  } else {
    const double w = (t - times_[hi - 1]) / (times_[hi] - times_[hi - 1]);
    for (std::size_t k = 0; k < m.size(); ++k)
      out.values[k] = (1.0 - w) * samples_[hi - 1][k] + w * samples_[hi][k];
  }
  out.clamp_boundary();
  return out;
}

DiscreteField Forcing::average(const Mesh& m, double a, double b) const {
  if (!(b > a)) throw ParameterError("forcing average needs a nonempty interval");
  DiscreteField out(m);
  if (zero()) return out;
  if (expr_) {
    static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m.on_boundary(k)) continue;
      const Point x = m.node(k);
      double s = 0.0;
      for (int g = 0; g < 5; ++g) s += wg[g] * expr_(x, 0.5 * (a + b) + 0.5 * (b - a) * xg[g]);
      out.values[k] = 0.5 * s;
    }
    return out;
  }
  // Piecewise linear in t: trapezoid between consecutive breakpoints is exact.
  std::vector<double> pts{a};
  for (double t : times_)
    if (t > a && t < b) pts.push_back(t);
  pts.push_back(b);
  DiscreteField prev = at(m, pts[0]);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const DiscreteField cur = at(m, pts[i]);
    const double w = 0.5 * (pts[i] - pts[i - 1]) / (b - a);
    for (std::size_t k = 0; k < m.size(); ++k) out.values[k] += w * (prev[k] + cur[k]);
    prev = cur;
  }
  return out;
}

const DiscreteField& TrajectoryReport::pi_u(double t) const {
  const long n = t <= 0.0 ? 0 : std::min<long>(N, static_cast<long>(std::ceil(t / tau() - 1e-12)));
  return u[n];
}

const DiscreteField& TrajectoryReport::pi_xi(double t) const {
  const long n = t <= 0.0 ? 0 : std::min<long>(N, static_cast<long>(std::ceil(t / tau() - 1e-12)));
  return xi[n];
}

namespace {
DiscreteField linear_interp(const std::vector<DiscreteField>& fields, double t, double tau, int N) {
  const double r = std::clamp(t / tau, 0.0, static_cast<double>(N));
  const int n = std::min(N - 1, static_cast<int>(std::floor(r)));
  const double w = r - n;
  return (1.0 - w) * fields[n] + w * fields[n + 1];
}
}  // namespace

DiscreteField TrajectoryReport::lambda_u(double t) const { return linear_interp(u, t, tau(), N); }
DiscreteField TrajectoryReport::lambda_xi(double t) const { return linear_interp(xi, t, tau(), N); }

const LedgerEntry* TrajectoryReport::find(const std::string& name, long step) const {
  for (const auto& e : ledger)
    if (e.name == name && e.step == step) return &e;
  return nullptr;
}

std::pair<DiscreteField, DiscreteField> initial_pair_from_generator(const Mesh& m, const FluxModel& flux,
                                                                    const MonotoneGraph& beta, const DiscreteField& h0,
                                                                    const EllipticOptions& opts) {
  EllipticOptions o = opts;
  o.operator_scale = 1.0;
  EllipticSolution sol = solve_elliptic(m, flux, beta, h0, o);
  return {std::move(sol.u), std::move(sol.xi)};
}

void validate_initial_pair(const MonotoneGraph& beta, const DiscreteField& u0, const DiscreteField& xi0, double tol) {
  check_same_mesh(u0.mesh, xi0.mesh, "initial pair");
  std::ostringstream bad;
  int count = 0;
  for (std::size_t k = 0; k < u0.size(); ++k) {
    const bool boundary = u0.mesh.on_boundary(k);
    const bool fail = boundary ? u0[k] != 0.0 : beta.membership_defect(u0[k], xi0[k]) > tol;
    if (!fail) continue;
    if (count < 10) bad << (count ? "; " : "") << "node " << k << " u0=" << u0[k] << " xi0=" << xi0[k]
                        << (boundary ? " (boundary)" : "");
    ++count;
  }
  if (count) {
    std::ostringstream msg;
    msg << count << " initial node(s) violate xi0 in beta(u0) or the boundary condition: " << bad.str();
    throw MembershipError(msg.str());
  }
}

EllipticSolution step(const ProblemSetup& setup, int n, const DiscreteField& xi_n, const DiscreteField& f_n,
                      const DiscreteField& warm) {
  const double tau = setup.tau();
  DiscreteField h(setup.mesh);
  for (std::size_t k = 0; k < h.size(); ++k)
    h.values[k] = setup.mesh.on_boundary(k) ? 0.0 : xi_n[k] + tau * f_n[k];
  EllipticOptions o = setup.solver;
  o.operator_scale = tau;
  o.warm_start = warm;
  o.check_tv = false;
  auto annotate = [n](const std::exception& e) { return "step " + std::to_string(n + 1) + ": " + e.what(); };
  try {
    return solve_elliptic(setup.mesh, setup.flux, setup.beta, h, o);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(annotate(e));
  } catch (const MembershipError& e) {
    throw MembershipError(annotate(e));
  }
}

TrajectoryReport run(const ProblemSetup& setup) {
  if (!(setup.T > 0.0) || setup.N < 1) throw ParameterError("time horizon must be positive and steps >= 1");
  const Mesh& m = setup.mesh;
  check_same_mesh(m, setup.u0.mesh, "run initial u");
  check_same_mesh(m, setup.xi0.mesh, "run initial xi");
  validate_initial_pair(setup.beta, setup.u0, setup.xi0, 1e-6);

  const double tau = setup.tau();
  const double p = setup.flux.p;
  TrajectoryReport rep;
  rep.mesh = m;
  rep.T = setup.T;
  rep.N = setup.N;
  rep.u.push_back(setup.u0);
  DiscreteField xi0 = setup.xi0;
  xi0.clamp_boundary();
  rep.xi.push_back(xi0);
  for (int n = 0; n < setup.N; ++n) rep.f_avg.push_back(setup.f.average(m, n * tau, (n + 1) * tau));

  const std::vector<double> qs = default_q(setup.flux, setup.q_values);
  const bool tv = setup.bv_check && setup.flux.x_independent;
  auto& L = rep.ledger;

  std::vector<double> sup_f(qs.size(), 0.0);
  for (std::size_t iq = 0; iq < qs.size(); ++iq)
    for (const auto& f : rep.f_avg) sup_f[iq] = std::max(sup_f[iq], lq_norm(f, qs[iq]));
  double sup_tv_f = 0.0;
  for (const auto& f : rep.f_avg) sup_tv_f = std::max(sup_tv_f, total_variation(f));

  double grad_sum = 0.0, grad_sup = 0.0, gap_total = 0.0, res_total = 0.0;
  for (int n = 0; n < setup.N; ++n) {
    const DiscreteField& xin = rep.xi[n];
    const DiscreteField& un = rep.u[n];
    const DiscreteField& fn = rep.f_avg[n];
    EllipticSolution sol = step(setup, n, xin, fn, un);
    const long s = n + 1;
    rep.residuals.push_back(sol.residual);
    rep.continuation_gaps.push_back(sol.continuation_gaps.empty() ? 0.0 : sol.continuation_gaps.back());
    const double res_abs = sol.residual * std::max(1.0, lq_norm(xin, kInf) + tau * lq_norm(fn, kInf));
    res_total += res_abs;

    for (std::size_t iq = 0; iq < qs.size(); ++iq) {
      const double q = qs[iq];
      const double mp = measure_power(m, q);
      L.push_back(bound_entry("xi_lq_step" + q_tag(q), s, lq_norm(sol.xi, q), tau * lq_norm(fn, q) + lq_norm(xin, q),
                              1e-8, res_abs * mp));
      L.push_back(bound_entry("xi_lq_global" + q_tag(q), s, lq_norm(sol.xi, q), setup.T * sup_f[iq] + lq_norm(xi0, q),
                              1e-8, res_total * mp));
    }
    if (tv) {
      L.push_back(bound_entry("xi_tv_step", s, total_variation(sol.xi), tau * total_variation(fn) + total_variation(xin),
                              1e-6, 2.0 * res_abs));
      L.push_back(bound_entry("xi_tv_global", s, total_variation(sol.xi), setup.T * sup_tv_f + total_variation(xi0),
                              1e-6, 2.0 * res_total));
    }

    // Convexity of j* with xi^n in beta(u^n) and xi^{n+1} in beta(u^{n+1}).
    const DiscreteField dxi = sol.xi - xin;
    const double jn = conjugate_mass(setup.beta, xin);
    const double jn1 = conjugate_mass(setup.beta, sol.xi);
    double cross = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) cross += m.volume(k) * std::abs(dxi[k]) * (std::abs(un[k]) + std::abs(sol.u[k]));
    const double escale = 1e-8 * (1.0 + std::abs(jn) + std::abs(jn1) + cross);
    const double lower = inner(dxi, un);
    const double upper = inner(dxi, sol.u);
    L.push_back(bound_entry("energy_lower", s, lower, jn1 - jn, 0.0, escale));
    L.push_back(bound_entry("energy_upper", s, jn1 - jn, upper, 0.0, escale));
    L.push_back(reported_entry("energy_gap", s, upper - (jn1 - jn)));
    gap_total += upper - (jn1 - jn);

    L.push_back(reported_entry("solver_residual", s, sol.residual));
    const double gp = gradient_power_sum(m, sol.u, p);
    grad_sum += tau * gp;
    grad_sup = std::max(grad_sup, gp);

    rep.lipschitz_constant = std::max(rep.lipschitz_constant, lq_norm(dxi, 1.0) / tau);
    rep.u.push_back(std::move(sol.u));
    rep.xi.push_back(std::move(sol.xi));
  }

  for (std::size_t iq = 0; iq < qs.size(); ++iq) {
    const double q = qs[iq];
    double sup_xi = 0.0;
    for (const auto& x : rep.xi) sup_xi = std::max(sup_xi, lq_norm(x, q));
    L.push_back(bound_entry("xi_lq_sup" + q_tag(q), -1, sup_xi, setup.T * sup_f[iq] + lq_norm(xi0, q), 1e-8,
                            res_total * measure_power(m, q)));
  }
  if (tv) {
    double sup_tv = 0.0;
    for (const auto& x : rep.xi) sup_tv = std::max(sup_tv, total_variation(x));
    L.push_back(bound_entry("xi_tv_sup", -1, sup_tv, setup.T * sup_tv_f + total_variation(xi0), 1e-6, 2.0 * res_total));
  }
  L.push_back(reported_entry("grad_p_time_integral", -1, grad_sum));
  L.push_back(reported_entry("grad_p_sup", -1, grad_sup));
  L.push_back(reported_entry("energy_gap_total", -1, gap_total));

  // Discrete time-Lipschitz bound: contraction between consecutive steps, with f(., t) = f(., 0) for t < 0.
  const DiscreteField f0 = setup.f.at(m, 0.0);
  const DiscreteField au0 = apply_operator(m, setup.flux, setup.u0);
  const double init = lq_norm(f0 - au0, 1.0);
  double drift = lq_norm(rep.f_avg[0] - f0, 1.0);
  for (int n = 1; n < setup.N; ++n) drift += lq_norm(rep.f_avg[n] - rep.f_avg[n - 1], 1.0);
  const double lip_rhs = init + drift;
  L.push_back(reported_entry("initial_operator_l1", -1, init));
  L.push_back(reported_entry("forcing_time_variation_l1", -1, drift));
  L.push_back(bound_entry("xi_time_lipschitz", -1, rep.lipschitz_constant, lip_rhs, 0.0,
                          1e-6 * std::max(1.0, lip_rhs) + res_total / tau));

  if (setup.linf_check) {
    double umax = 0.0;
    for (const auto& u : rep.u) umax = std::max(umax, lq_norm(u, kInf));
    LedgerEntry e = reported_entry("u_linf_max", -1, umax);
    L.push_back(e);
    L.push_back(bound_entry("u_linf_finite", -1, std::isfinite(umax) ? 0.0 : 1.0, 0.0, 0.0));
  }
  return rep;
}

CompareReport compare(const ProblemSetup& a, const ProblemSetup& b) {
  check_same_mesh(a.mesh, b.mesh, "compare");
  if (!a.flux.x_independent || !b.flux.x_independent)
    throw PreconditionError("comparison requires an x-independent flux");
  if (a.flux.name != b.flux.name) throw PreconditionError("comparison requires the same flux in both setups");
  if (a.beta.name() != b.beta.name() || a.beta.segments().size() != b.beta.segments().size())
    throw PreconditionError("comparison requires the same graph in both setups");
  if (a.N != b.N || a.T != b.T) throw PreconditionError("comparison requires the same time grid");

  CompareReport out;
  out.first = run(a);
  out.second = run(b);
  const auto& r1 = out.first;
  const auto& r2 = out.second;
  const double tau = a.tau();
  const double measure = a.mesh.measure();

  double pos_rhs = positive_mass(r1.xi[0] - r2.xi[0]);
  double l1_rhs = lq_norm(r1.xi[0] - r2.xi[0], 1.0);
  double slack = 0.0;
  for (int n = 1; n <= a.N; ++n) {
    const DiscreteField df = r1.f_avg[n - 1] - r2.f_avg[n - 1];
    pos_rhs += tau * positive_mass(df);
    l1_rhs += tau * lq_norm(df, 1.0);
    // Each solve sits within its continuation gap of the limiting discrete solution.
    slack += 2.0 * measure * (r1.residuals[n - 1] + r2.residuals[n - 1]) +
             2.0 * (r1.continuation_gaps[n - 1] + r2.continuation_gaps[n - 1]);
    const DiscreteField dxi = r1.xi[n] - r2.xi[n];
    out.ledger.push_back(bound_entry("comparison_positive_part", n, positive_mass(dxi), pos_rhs, 1e-8, slack));
    out.ledger.push_back(bound_entry("comparison_l1", n, lq_norm(dxi, 1.0), l1_rhs, 1e-8, slack));
  }
  return out;
}

std::vector<ConvergenceRow> convergence_table(const std::vector<ProblemSetup>& ladder,
                                              const std::function<double(const Point&, double)>& exact) {
  if (ladder.empty()) throw ParameterError("convergence ladder is empty");
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    const auto& c = ladder[k - 1];
    const auto& f = ladder[k];
    if (f.N != 2 * c.N || f.mesh.nx - 1 != 2 * (c.mesh.nx - 1) || (c.mesh.dim == 2 && f.mesh.ny - 1 != 2 * (c.mesh.ny - 1)))
      throw ParameterError("convergence ladder must halve tau and h at every level");
  }
  std::vector<TrajectoryReport> runs;
  for (const auto& s : ladder) runs.push_back(run(s));
  const std::size_t last = runs.size() - 1;
  const std::size_t levels = exact ? runs.size() : last;

  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < levels; ++k) {
    const auto& r = runs[k];
    const Mesh& m = r.mesh;
    double err = 0.0;
    for (int n = 0; n <= r.N; ++n) {
      DiscreteField ref(m);
      if (exact) {
        for (std::size_t i = 0; i < m.size(); ++i) ref.values[i] = exact(m.node(i), n * r.tau());
      } else {
        const auto& fine = runs[last];
        const int ft = 1 << (last - k);
        const auto& fu = fine.u[static_cast<std::size_t>(n) * ft];
        for (int j = 0; j < m.ny; ++j)
          for (int i = 0; i < m.nx; ++i) ref.values[m.index(i, j)] = fu[fine.mesh.index(i * ft, m.dim == 2 ? j * ft : 0)];
      }
      err = std::max(err, lq_norm(r.u[n] - ref, 2.0));
    }
    ConvergenceRow row;
    row.N = r.N;
    row.cells = m.nx - 1;
    row.tau = r.tau();
    row.h = m.hx;
    row.error = err;
    row.order = rows.empty() || err <= 0.0 ? 0.0 : std::log2(rows.back().error / err);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dnp
