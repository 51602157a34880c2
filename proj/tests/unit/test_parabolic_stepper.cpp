#include <gtest/gtest.h>

#include <cmath>

#include "dnp/errors.hpp"
#include "dnp/parabolic_stepper.hpp"
#include "oracles.hpp"

using namespace dnp;

namespace {

DiscreteField sine(const Mesh& m) {
  DiscreteField f = DiscreteField::sample(m, [](const Point& x) { return std::sin(M_PI * x.x); });
  f.clamp_boundary();
  return f;
}

ProblemSetup heat(int cells, int N, double T) {
  ProblemSetup s;
  s.mesh = Mesh::interval(0, 1, cells);
  s.T = T;
  s.N = N;
  s.u0 = sine(s.mesh);
  s.xi0 = s.u0;
  return s;
}

ProblemSetup stefan(int cells, int N, double T) {
  ProblemSetup s;
  s.mesh = Mesh::interval(0, 1, cells);
  s.beta = make_heaviside();
  s.T = T;
  s.N = N;
  s.u0 = DiscreteField(s.mesh);
  s.xi0 = DiscreteField::sample(s.mesh, [](const Point& x) { return x.x > 0.4 && x.x < 0.6 ? 1.0 : 0.0; });
  s.q_values = {1.0, 2.0, kInf};
  return s;
}

}  // namespace

TEST(Forcing, ClosedFormAverageIsExactForPolynomials) {
  const Mesh m = Mesh::interval(0, 1, 4);
  const Forcing f = Forcing::closed_form([](const Point& x, double t) { return x.x * t * t * t; });
  const DiscreteField a = f.average(m, 0.5, 1.5);
  // (1/1) int_0.5^1.5 t^3 dt = (1.5^4 - 0.5^4) / 4 = 1.25
  EXPECT_NEAR(a[2], 0.5 * 1.25, 1e-14);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[4], 0.0);
}

TEST(Forcing, SampledIsPiecewiseLinearAndHeldOutside) {
  const Mesh m = Mesh::interval(0, 1, 2);
  const Forcing f = Forcing::sampled({0.0, 1.0}, {DiscreteField(m, 0.0), DiscreteField(m, 2.0)});
  EXPECT_DOUBLE_EQ(f.at(m, 0.25)[1], 0.5);
  EXPECT_DOUBLE_EQ(f.at(m, 3.0)[1], 2.0);
  EXPECT_DOUBLE_EQ(f.at(m, -1.0)[1], 0.0);
  EXPECT_EQ(f.at(m, 0.5)[0], 0.0);
  // Average over [0.5, 2]: linear part from 0.5 to 1 averages 1.5, constant 2 after.
  EXPECT_NEAR(f.average(m, 0.5, 2.0)[1], (0.5 * 1.5 + 1.0 * 2.0) / 1.5, 1e-15);
  EXPECT_THROW(Forcing::sampled({1.0, 0.5}, {DiscreteField(m), DiscreteField(m)}), ParameterError);
}

TEST(Step, ZeroDataStaysZero) {
  ProblemSetup s = heat(16, 4, 0.1);
  s.u0 = DiscreteField(s.mesh);
  s.xi0 = s.u0;
  const TrajectoryReport r = run(s);
  for (int n = 0; n <= s.N; ++n) {
    EXPECT_EQ(lq_norm(r.u[n], kInf), 0.0);
    EXPECT_EQ(lq_norm(r.xi[n], kInf), 0.0);
  }
  EXPECT_TRUE(r.all_pass());
  for (const auto& e : r.ledger)
    if (e.asserted) EXPECT_EQ(e.lhs, 0.0) << e.name;
}

TEST(Step, HeatRecurrenceOnFourierMode) {
  const ProblemSetup s = heat(64, 20, 0.2);
  const TrajectoryReport r = run(s);
  const double tau = s.tau();
  const double lam_h = oracle::discrete_sine_eigenvalue(s.mesh.hx);
  const double h2 = s.mesh.hx * s.mesh.hx;
  for (int n = 0; n <= s.N; ++n) {
    const double discrete = std::pow(1.0 + tau * lam_h, -n);
    const double continuum = std::pow(1.0 + tau * M_PI * M_PI, -n);
    EXPECT_LE(lq_norm(r.u[n] - discrete * sine(s.mesh), kInf), 1e-6) << n;
    EXPECT_LE(lq_norm(r.u[n] - continuum * sine(s.mesh), kInf), 5 * h2) << n;
  }
  EXPECT_TRUE(r.all_pass());
}

TEST(Step, SingleStepMatchesRun) {
  const ProblemSetup s = heat(32, 4, 0.1);
  const TrajectoryReport r = run(s);
  const EllipticSolution one = step(s, 0, s.xi0, DiscreteField(s.mesh), s.u0);
  EXPECT_LE(lq_norm(one.u - r.u[1], kInf), 1e-12);
}

TEST(Run, PerStepBoundInConjugateExponent) {
  ProblemSetup s = heat(32, 8, 0.1);
  s.flux = make_p_laplacian(3.0);
  s.f = Forcing::closed_form([](const Point& x, double t) { return std::cos(2 * x.x + t); });
  const TrajectoryReport r = run(s);
  const std::string tag = "xi_lq_step[q=" + format_real(1.5) + "]";
  for (int n = 1; n <= s.N; ++n) {
    const LedgerEntry* e = r.find(tag, n);
    ASSERT_NE(e, nullptr) << n;
    EXPECT_TRUE(e->pass) << n;
  }
  EXPECT_TRUE(r.all_pass());
}

TEST(Run, StefanMassBound) {
  const ProblemSetup s = stefan(64, 40, 0.05);
  const TrajectoryReport r = run(s);
  const LedgerEntry* e = r.find("xi_lq_sup[q=1]");
  ASSERT_NE(e, nullptr);
  EXPECT_TRUE(e->pass);
  EXPECT_NEAR(e->rhs, lq_norm(s.xi0, 1.0), 1e-15);
  EXPECT_TRUE(r.all_pass());
}

TEST(Run, EnergyInequalitiesAndReports) {
  ProblemSetup s = stefan(64, 20, 0.05);
  s.flux = make_p_laplacian(1.5);
  s.f = Forcing::closed_form([](const Point& x, double t) { return 0.5 + 0.5 * std::sin(3 * x.x + t); });
  const TrajectoryReport r = run(s);
  EXPECT_TRUE(r.all_pass());
  for (const char* name : {"grad_p_time_integral", "grad_p_sup", "energy_gap_total", "u_linf_max"}) {
    const LedgerEntry* e = r.find(name);
    ASSERT_NE(e, nullptr) << name;
    EXPECT_FALSE(e->asserted);
    EXPECT_TRUE(std::isfinite(e->lhs));
  }
  for (int n = 1; n <= s.N; ++n) {
    ASSERT_NE(r.find("energy_lower", n), nullptr);
    EXPECT_TRUE(r.find("energy_upper", n)->pass);
  }
}

TEST(Run, TotalVariationNonincreasingWithoutForcing) {
  ProblemSetup s = stefan(64, 20, 0.05);
  s.bv_check = true;
  const TrajectoryReport r = run(s);
  EXPECT_TRUE(r.all_pass());
  for (int n = 1; n <= s.N; ++n) EXPECT_LE(total_variation(r.xi[n]), total_variation(r.xi[n - 1]) * (1 + 1e-6) + 1e-9);
}

TEST(Run, InterpolantsFollowStepConvention) {
  const ProblemSetup s = heat(16, 4, 1.0);
  const TrajectoryReport r = run(s);
  EXPECT_EQ(&r.pi_u(0.0), &r.u[0]);
  EXPECT_EQ(&r.pi_u(0.1), &r.u[1]);
  EXPECT_EQ(&r.pi_u(0.25), &r.u[1]);
  EXPECT_EQ(&r.pi_u(0.26), &r.u[2]);
  EXPECT_EQ(&r.pi_xi(1.0), &r.xi[4]);
  const DiscreteField mid = r.lambda_u(0.375);
  for (std::size_t k = 0; k < mid.size(); ++k) EXPECT_NEAR(mid[k], 0.5 * (r.u[1][k] + r.u[2][k]), 1e-15);
}

TEST(Run, Deterministic) {
  ProblemSetup s = stefan(48, 10, 0.05);
  s.f = Forcing::closed_form([](const Point& x, double t) { return std::sin(5 * x.x - t); });
  const TrajectoryReport a = run(s), b = run(s);
  ASSERT_EQ(a.ledger.size(), b.ledger.size());
  for (std::size_t k = 0; k < a.ledger.size(); ++k) {
    EXPECT_EQ(a.ledger[k].lhs, b.ledger[k].lhs);
    EXPECT_EQ(a.ledger[k].rhs, b.ledger[k].rhs);
  }
  for (int n = 0; n <= s.N; ++n) EXPECT_EQ(a.u[n].values, b.u[n].values);
}

TEST(Run, RejectsInvalidSetup) {
  ProblemSetup s = heat(16, 4, 0.1);
  s.xi0 = DiscreteField(s.mesh);
  EXPECT_THROW(run(s), MembershipError);
  ProblemSetup t = heat(16, 0, 0.1);
  EXPECT_THROW(run(t), ParameterError);
}

TEST(InitialPair, DirectAndGenerator) {
  const Mesh m = Mesh::interval(0, 1, 8);
  DiscreteField u0(m), xi0(m, 0.5);
  xi0.clamp_boundary();
  EXPECT_NO_THROW(validate_initial_pair(make_heaviside(), u0, xi0));
  DiscreteField one(m, 1.0);
  one.clamp_boundary();
  EXPECT_THROW(validate_initial_pair(make_identity(), one, DiscreteField(m)), MembershipError);
  const auto [gu, gx] = initial_pair_from_generator(m, make_p_laplacian(2.0), make_heaviside(), DiscreteField(m));
  EXPECT_EQ(lq_norm(gu, kInf), 0.0);
  EXPECT_EQ(lq_norm(gx, kInf), 0.0);
}

TEST(Compare, IdenticalSetupsHaveZeroDistance) {
  const ProblemSetup s = stefan(32, 10, 0.05);
  const CompareReport c = compare(s, s);
  EXPECT_TRUE(c.all_pass());
  for (const auto& e : c.ledger) EXPECT_EQ(e.lhs, 0.0);
}

TEST(Compare, OrderedInitialDataStayOrdered) {
  for (double p : {1.5, 2.0, 3.0}) {
    ProblemSetup lo = stefan(48, 12, 0.05);
    lo.flux = make_p_laplacian(p);
    ProblemSetup hi = lo;
    hi.xi0 = DiscreteField::sample(hi.mesh, [](const Point& x) { return x.x > 0.3 && x.x < 0.7 ? 1.0 : 0.0; });
    const CompareReport c = compare(hi, lo);
    EXPECT_TRUE(c.all_pass()) << p;
    for (int n = 0; n <= lo.N; ++n)
      for (std::size_t k = 0; k < lo.mesh.size(); ++k) EXPECT_GE(c.first.xi[n][k], c.second.xi[n][k] - 1e-7) << p;
  }
}

TEST(Compare, ForcingOffsetGrowsAtMostLinearly) {
  ProblemSetup a = stefan(48, 16, 0.1);
  ProblemSetup b = a;
  const double delta = 0.3;
  b.f = Forcing::closed_form([delta](const Point&, double) { return delta; });
  const CompareReport c = compare(b, a);
  EXPECT_TRUE(c.all_pass());
  DiscreteField d(a.mesh, delta);
  d.clamp_boundary();
  const double slope = lq_norm(d, 1.0);
  for (int n = 1; n <= a.N; ++n)
    EXPECT_LE(lq_norm(c.first.xi[n] - c.second.xi[n], 1.0), n * a.tau() * slope * (1 + 1e-8) + 1e-7);
}

TEST(Compare, RejectsXDependentFluxAndMismatch) {
  ProblemSetup a = stefan(16, 4, 0.05);
  ProblemSetup b = a;
  b.flux = make_weighted_p_laplacian(2.0, [](const Point&) { return 1.0; }, 1.0, 1.0);
  EXPECT_THROW(compare(a, b), PreconditionError);
  ProblemSetup c = a;
  c.beta = make_sign();
  EXPECT_THROW(compare(a, c), PreconditionError);
  ProblemSetup d = a;
  d.N = 5;
  EXPECT_THROW(compare(a, d), PreconditionError);
}

TEST(Entropy, ZeroTrajectoryPasses) {
  ProblemSetup s = stefan(32, 8, 0.05);
  s.xi0 = DiscreteField(s.mesh);
  const TrajectoryReport r = run(s);
  const auto family = make_test_family(s.mesh, s.T, 5);
  const auto entries = entropy_check(s, r, {0.0, 0.25, 0.5, 1.0}, family, 0.0);
  EXPECT_FALSE(entries.empty());
  for (const auto& e : entries) EXPECT_TRUE(e.pass) << e.name << " " << e.lhs;
}

TEST(Entropy, ZeroTestFunctionGivesZero) {
  const ProblemSetup s = stefan(32, 8, 0.05);
  const TrajectoryReport r = run(s);
  TestFunction zero{"zero", [](const Point&, double) { return 0.0; }, false};
  for (const auto& e : entropy_check(s, r, {-0.5, 0.0, 0.5}, {zero}, 0.0)) EXPECT_EQ(e.lhs, 0.0);
}

TEST(Entropy, StefanPassesAndCorruptionIsFlagged) {
  ProblemSetup s = stefan(128, 100, 0.05);
  s.f = Forcing::closed_form([](const Point& x, double t) { return 0.5 + 0.5 * std::sin(3 * x.x + t); });
  TrajectoryReport r = run(s);
  const auto family = make_test_family(s.mesh, s.T, 5);
  const std::vector<double> svals{0.0, 0.25, 0.5, 1.0};
  const double slack = default_entropy_slack(r);
  for (const auto& e : entropy_check(s, r, svals, family, slack)) EXPECT_TRUE(e.pass) << e.name << " " << e.lhs;

  for (int n = 1; n <= s.N; ++n)
    for (std::size_t k = 0; k < s.mesh.size(); ++k) {
      const double x = s.mesh.node(k).x;
      if (x >= 0.25 && x <= 0.5) r.xi[n][k] += 0.2;
    }
  bool flagged = false;
  for (const auto& e : entropy_check(s, r, svals, family, slack)) flagged = flagged || !e.pass;
  EXPECT_TRUE(flagged);
}

TEST(Entropy, BoundaryMembersSkippedForNegativeLevels) {
  const ProblemSetup s = stefan(32, 4, 0.05);
  const TrajectoryReport r = run(s);
  const auto family = make_test_family(s.mesh, s.T, 4);
  const auto pos = entropy_check(s, r, {0.5}, family, 1.0);
  const auto neg = entropy_check(s, r, {-0.5}, family, 1.0);
  EXPECT_EQ(pos.size(), 8u);
  EXPECT_EQ(neg.size(), 4u);  // two of the four members touch the boundary
}

TEST(Convergence, ManufacturedSolutionFirstOrder) {
  auto exact = [](const Point& x, double t) { return std::exp(-t) * std::sin(M_PI * x.x); };
  std::vector<ProblemSetup> ladder;
  for (int k = 0; k < 3; ++k) {
    ProblemSetup s = heat(32 << k, 16 << k, 1.0);
    s.f = Forcing::closed_form(
        [](const Point& x, double t) { return (M_PI * M_PI - 1.0) * std::exp(-t) * std::sin(M_PI * x.x); });
    ladder.push_back(s);
  }
  const auto rows = convergence_table(ladder, exact);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GE(rows[1].order, 0.9);
  EXPECT_GE(rows[2].order, 0.9);
  const auto self = convergence_table(ladder, nullptr);
  EXPECT_EQ(self.size(), 2u);
  EXPECT_GT(self[0].error, self[1].error);
  std::vector<ProblemSetup> bad{ladder[0], ladder[2]};
  EXPECT_THROW(convergence_table(bad, exact), ParameterError);
}
