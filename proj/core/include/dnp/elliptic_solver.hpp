#pragma once

#include <optional>
#include <vector>

#include "dnp/flux_model.hpp"
#include "dnp/ledger.hpp"
#include "dnp/mesh.hpp"
#include "dnp/monotone_graph.hpp"

namespace dnp {

struct EllipticOptions {
  double tol_inner = 1e-10;  // max-norm of the pointwise residual, relative to max(1, |h|_inf)
  double tol_cont = 1e-8;    // l1 change of xi between continuation stages
  double tol_res = 1e-8;
  int max_iter = 200;        // per stage
  int max_stages = 20;
  double lambda0 = 1.0;
  double operator_scale = 1.0;  // solve xi + s * A_h u = h
  std::vector<double> q_values;  // empty: {1, p', 2, inf}
  bool check_tv = true;          // TV(xi) <= TV(h); applied only to x-independent flux and h = 0 on the boundary
  double estimate_rel_tol = 1e-8;
  double tv_rel_tol = 1e-6;
  std::optional<DiscreteField> warm_start;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

struct EllipticSolution {
  DiscreteField u;
  DiscreteField xi;
  double residual = 0.0;
  int iterations = 0;
  int stages = 0;
  double lambda_final = 0.0;
  double epsilon_final = 0.0;
  double membership_defect = 0.0;
  bool continuation_converged = false;
  std::vector<double> continuation_gaps;  // |xi_k - xi_{k-1}|_1
  std::vector<LedgerEntry> estimate_report;
};

/// Minimizer of sum vol (eps u^2/2 + j_lambda(u) - h u) + s * energy(u) over fields vanishing on the boundary,
/// i.e. the solution of eps u + beta_lambda(u) + s A_h u = h at interior nodes. Damped Newton with a
/// Levenberg shift and backtracking. Throws ConvergenceError after max_iter iterations.
DiscreteField solve_regularized(const Mesh& m, const FluxModel& flux, const MonotoneGraph& beta, const DiscreteField& h,
                                double lambda, double eps, const std::optional<DiscreteField>& warm_start = std::nullopt,
                                const EllipticOptions& opts = {}, SolveStats* stats = nullptr);

/// Continuation lambda_k = lambda0 4^-k (eps_k = lambda_k when p < 2), xi = h - s A_h u, membership certified.
/// Throws MembershipError naming the worst node when xi is not on the graph at the last stage.
EllipticSolution solve_elliptic(const Mesh& m, const FluxModel& flux, const MonotoneGraph& beta, const DiscreteField& h,
                                const EllipticOptions& opts = {});

/// |xi1 - xi2|_1 <= |h1 - h2|_1 and int (xi1 - xi2)_+ <= int (h1 - h2)_+, with slack for the solver residuals.
std::vector<LedgerEntry> contraction_check(const EllipticSolution& s1, const EllipticSolution& s2, const DiscreteField& h1,
                                           const DiscreteField& h2);

/// Normalized means |Omega|^{-1/q} |u|_q for q = p mu^l, l = 0..levels: asserted nondecreasing in q and
/// below |u|_inf; |u|_inf is reported.
std::vector<LedgerEntry> linf_bound_check(const EllipticSolution& sol, const DiscreteField& h, double p, double mu,
                                          int levels = 8);

/// Default exponent for the L^q ladder of linf_bound_check.
double moser_exponent(int dim, double p);

/// Pointwise defect |u - b(u + xi)| at interior nodes; returns the worst node and value.
std::pair<std::size_t, double> worst_membership(const MonotoneGraph& beta, const DiscreteField& u, const DiscreteField& xi);

}  // namespace dnp
