#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dnp/elliptic_solver.hpp"
#include "dnp/flux_model.hpp"
#include "dnp/ledger.hpp"
#include "dnp/mesh.hpp"
#include "dnp/monotone_graph.hpp"

namespace dnp {

/// Source term f(x, t), either closed form or nodal samples at increasing times
/// (piecewise linear in t between samples, constant outside the sampled window).
class Forcing {
 public:
  Forcing() = default;
  static Forcing closed_form(std::function<double(const Point&, double)> f);
  static Forcing sampled(std::vector<double> times, std::vector<DiscreteField> fields);

  bool zero() const { return !expr_ && samples_.empty(); }

  /// f(., t) on the mesh, boundary nodes set to zero.
  DiscreteField at(const Mesh& m, double t) const;
  /// (1/(b - a)) int_a^b f(., t) dt: 5-point Gauss for closed forms, exact for samples.
  DiscreteField average(const Mesh& m, double a, double b) const;

 private:
  std::function<double(const Point&, double)> expr_;
  std::vector<double> times_;
  std::vector<DiscreteField> samples_;
};

struct ProblemSetup {
  Mesh mesh;
  FluxModel flux = make_p_laplacian(2.0);
  MonotoneGraph beta = make_identity();
  double T = 1.0;
  int N = 1;
  DiscreteField u0;
  DiscreteField xi0;
  Forcing f;
  EllipticOptions solver;
  std::vector<double> q_values;  // empty: {1, p', 2, inf}
  bool bv_check = false;
  bool linf_check = true;

  double tau() const { return T / N; }
};

struct TrajectoryReport {
  Mesh mesh;
  double T = 0.0;
  int N = 0;
  std::vector<DiscreteField> u;      // n = 0..N
  std::vector<DiscreteField> xi;     // n = 0..N
  std::vector<DiscreteField> f_avg;  // n = 0..N-1, average over (n tau, (n+1) tau]
  std::vector<double> residuals;     // per step, n = 1..N at index n-1
  std::vector<double> continuation_gaps;
  std::vector<LedgerEntry> ledger;
  double lipschitz_constant = 0.0;

  double tau() const { return T / N; }
  /// Piecewise constant interpolant: value of step n+1 on (n tau, (n+1) tau], step 0 at t = 0.
  const DiscreteField& pi_u(double t) const;
  const DiscreteField& pi_xi(double t) const;
  /// Piecewise linear interpolant through the step values.
  DiscreteField lambda_u(double t) const;
  DiscreteField lambda_xi(double t) const;
  bool all_pass() const { return all_asserted_pass(ledger); }
  const LedgerEntry* find(const std::string& name, long step = -1) const;
};

/// Initial pair from the elliptic problem xi0 + A_h u0 = h0 (so A_h u0 is the bounded field h0 - xi0).
std::pair<DiscreteField, DiscreteField> initial_pair_from_generator(const Mesh& m, const FluxModel& flux,
                                                                    const MonotoneGraph& beta, const DiscreteField& h0,
                                                                    const EllipticOptions& opts = {});
/// Throws MembershipError listing offending interior nodes when xi0 is not in beta(u0), or u0 is nonzero on the boundary.
void validate_initial_pair(const MonotoneGraph& beta, const DiscreteField& u0, const DiscreteField& xi0, double tol = 1e-6);

/// One implicit Euler step: solves xi + tau A_h u = xi^n + tau f^n.
EllipticSolution step(const ProblemSetup& setup, int n, const DiscreteField& xi_n, const DiscreteField& f_n,
                      const DiscreteField& warm);

TrajectoryReport run(const ProblemSetup& setup);

struct CompareReport {
  TrajectoryReport first;
  TrajectoryReport second;
  std::vector<LedgerEntry> ledger;
  bool all_pass() const { return all_asserted_pass(ledger); }
};

/// Runs both setups and checks int (xi1^n - xi2^n)_+ <= int (xi1^0 - xi2^0)_+ + sum_m tau int (f1^m - f2^m)_+
/// and the matching L1 bound at every step. Requires x-independent flux and a common mesh and graph.
CompareReport compare(const ProblemSetup& a, const ProblemSetup& b);

/// Nonnegative space-time test function zeta(x, t) supported in [0, T) x closure(Omega).
struct TestFunction {
  std::string label;
  std::function<double(const Point&, double)> value;
  bool touches_boundary = false;  // admissible only with s >= 0
};

/// Tensor products of the cubic profile 1 - 3r^2 + 2r^3 on dyadic subboxes, alternating full and half time support.
std::vector<TestFunction> make_test_family(const Mesh& m, double T, int count);

/// Default tolerance 10 (h^2 + tau) max(1, |xi|_inf, |u|_inf, |f|_inf).
double default_entropy_slack(const TrajectoryReport& rep);

/// Discrete Kruzhkov-type inequalities for v = u + xi; both are evaluated as "<= slack".
std::vector<LedgerEntry> entropy_check(const ProblemSetup& setup, const TrajectoryReport& rep,
                                       const std::vector<double>& s_values, const std::vector<TestFunction>& family,
                                       double slack);

struct ConvergenceRow {
  int N = 0;
  int cells = 0;
  double tau = 0.0;
  double h = 0.0;
  double error = 0.0;  // max_n |u^n - u_ref(t_n)|_2
  double order = 0.0;  // log2 of the error ratio to the previous row; 0 on the first row
};

/// Runs every setup; errors against `exact` when given, otherwise against the last (finest) run restricted
/// to the coarse nodes and times. Each ladder entry must refine the previous one by a factor 2 in N and cells.
std::vector<ConvergenceRow> convergence_table(const std::vector<ProblemSetup>& ladder,
                                              const std::function<double(const Point&, double)>& exact);

}  // namespace dnp
