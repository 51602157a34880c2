#include <gtest/gtest.h>

#include <cmath>

#include "dnp/errors.hpp"
#include "dnp/monotone_graph.hpp"
#include "dnp/random.hpp"
#include "oracles.hpp"

using namespace dnp;

namespace {

void expect_set(const Interval& got, double lo, double hi) {
  EXPECT_DOUBLE_EQ(got.lo, lo);
  EXPECT_DOUBLE_EQ(got.hi, hi);
}

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(rng.uniform(std::log(lo), std::log(hi))); }

}  // namespace

TEST(GraphEval, SignAtZeroIsFullInterval) { expect_set(make_sign().eval_set(0.0), -1.0, 1.0); }
TEST(GraphEval, IdentityIsSingleValued) { expect_set(make_identity().eval_set(3.5), 3.5, 3.5); }
TEST(GraphEval, HeavisideLeftOfJump) { expect_set(make_heaviside().eval_set(-2.0), 0.0, 0.0); }

TEST(GraphEval, OutsideDomainIsEmpty) {
  EXPECT_TRUE(make_logarithm().eval_set(-2.0).empty());
  EXPECT_TRUE(make_indicator(-1.0, 2.0).eval_set(2.5).empty());
  const Interval wall = make_indicator(-1.0, 2.0).eval_set(2.0);
  EXPECT_EQ(wall.lo, 0.0);
  EXPECT_EQ(wall.hi, kInf);
}

TEST(GraphEval, ZeroBelongsToBetaOfZero) {
  for (const auto& g : oracle::builtin_cases()) EXPECT_TRUE(g.graph.eval_set(0.0).contains(0.0)) << g.label;
}

TEST(GraphResolvent, SoftThresholdCase) { EXPECT_DOUBLE_EQ(make_sign().resolvent(1.0, 0.5), 0.0); }
TEST(GraphResolvent, SoftThresholdOutsideBand) { EXPECT_NEAR(make_sign().resolvent(1.0, 3.0), 2.0, 1e-14); }
TEST(GraphResolvent, IdentityDividesByOnePlusLambda) { EXPECT_NEAR(make_identity().resolvent(2.0, 6.0), 2.0, 1e-14); }

TEST(GraphResolvent, CubicRoot) {
  // s + s^3 = 2 has root 1; beta(s) = s^3 is the power graph with r = 4.
  EXPECT_NEAR(make_power(4.0).resolvent(1.0, 2.0), 1.0, 1e-12);
}

TEST(GraphResolvent, MatchesBisectionOracle) {
  Rng rng(7);
  for (const auto& g : oracle::builtin_cases()) {
    for (int k = 0; k < 300; ++k) {
      const double lambda = log_uniform(rng, 1e-3, 10.0);
      const double v = rng.uniform(-6.0, 6.0);
      EXPECT_NEAR(g.graph.resolvent(lambda, v), oracle::resolvent(g, lambda, v), 1e-10)
          << g.label << " lambda=" << lambda << " v=" << v;
    }
  }
}

TEST(GraphResolvent, RejectsNonpositiveLambda) {
  EXPECT_THROW(make_identity().resolvent(0.0, 1.0), ParameterError);
  EXPECT_THROW(make_identity().resolvent(-1.0, 1.0), ParameterError);
}

TEST(GraphYosida, SignRampZone) { EXPECT_NEAR(make_sign().yosida(0.5, 0.25), 0.5, 1e-14); }
TEST(GraphYosida, HeavisideNegativeSide) { EXPECT_DOUBLE_EQ(make_heaviside().yosida(0.1, -1.0), 0.0); }
TEST(GraphYosida, Identity) { EXPECT_NEAR(make_identity().yosida(1.0, 4.0), 2.0, 1e-14); }

TEST(GraphYosida, LipschitzMonotoneAndAnchored) {
  Rng rng(11);
  for (const auto& g : oracle::builtin_cases()) {
    for (double lambda : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
      EXPECT_EQ(g.graph.yosida(lambda, 0.0), 0.0) << g.label;
      for (int k = 0; k < 50; ++k) {
        const double s1 = rng.uniform(-4.0, 4.0), s2 = rng.uniform(-4.0, 4.0);
        const double y1 = g.graph.yosida(lambda, s1), y2 = g.graph.yosida(lambda, s2);
        EXPECT_LE(std::abs(y1 - y2), std::abs(s1 - s2) / lambda * (1.0 + 1e-9) + 1e-12) << g.label;
        EXPECT_GE((y1 - y2) * (s1 - s2), -1e-12) << g.label;
      }
    }
  }
}

TEST(GraphYosida, MembershipOfResolventPoint) {
  Rng rng(13);
  for (const auto& g : oracle::builtin_cases()) {
    for (int k = 0; k < 200; ++k) {
      const double lambda = log_uniform(rng, 1e-3, 10.0);
      const double s = rng.uniform(-5.0, 5.0);
      const double j = g.graph.resolvent(lambda, s);
      const double y = g.graph.yosida(lambda, s);
      EXPECT_TRUE(oracle::near_graph(g, j, y, 1e-12 * (1.0 + std::abs(j)), 1e-10 * (1.0 + std::abs(y))))
          << g.label << " s=" << j << " v=" << y;
    }
  }
}

TEST(GraphYosida, ConvergesToMinimalSection) {
  for (const auto& g : oracle::builtin_cases()) {
    for (double s : {-0.3, 0.0, 0.4, 0.9}) {
      if (g.set(s).empty()) continue;
      const double target = g.graph.minimal_section(s);
      double prev = kInf;
      for (int k = 1; k <= 30; ++k) {
        const double err = std::abs(g.graph.yosida(std::ldexp(1.0, -k), s) - target);
        EXPECT_LE(err, prev + 1e-12) << g.label << " s=" << s;
        prev = err;
      }
      EXPECT_LT(prev, 1e-6) << g.label << " s=" << s;
    }
  }
}

TEST(GraphMinimalSection, Examples) {
  EXPECT_EQ(make_sign().minimal_section(0.0), 0.0);
  EXPECT_EQ(make_heaviside().minimal_section(0.0), 0.0);
  EXPECT_EQ(make_identity().minimal_section(-7.0), -7.0);
  EXPECT_EQ(make_heaviside().minimal_section(2.0), 1.0);
  EXPECT_THROW(make_logarithm().minimal_section(-3.0), DomainError);
}

TEST(GraphPrimitive, Examples) {
  EXPECT_NEAR(make_identity().primitive(2.0), 2.0, 1e-14);
  EXPECT_NEAR(make_sign().primitive(-3.0), 3.0, 1e-14);
  EXPECT_NEAR(make_heaviside().primitive(5.0), 5.0, 1e-14);
  EXPECT_EQ(make_indicator(-1.0, 1.0).primitive(1.5), kInf);
}

TEST(GraphPrimitive, MatchesClosedForms) {
  for (const auto& g : oracle::builtin_cases()) {
    for (double s = -3.0; s <= 3.0; s += 0.125) {
      const double want = g.j(s);
      const double got = g.graph.primitive(s);
      if (std::isinf(want)) {
        EXPECT_EQ(got, kInf) << g.label << " s=" << s;
      } else {
        EXPECT_NEAR(got, want, 1e-9 * (1.0 + std::abs(want))) << g.label << " s=" << s;
      }
    }
  }
}

TEST(GraphConjugate, Examples) {
  EXPECT_NEAR(make_identity().conjugate(2.0), 2.0, 1e-14);
  EXPECT_NEAR(make_sign().conjugate(0.5), 0.0, 1e-14);
  EXPECT_EQ(make_sign().conjugate(2.0), kInf);
}

TEST(GraphConjugate, MatchesClosedForms) {
  for (const auto& g : oracle::builtin_cases()) {
    for (double v = -3.0; v <= 3.0; v += 0.125) {
      const double want = g.jstar(v);
      const double got = g.graph.conjugate(v);
      if (std::isinf(want)) {
        EXPECT_EQ(got, kInf) << g.label << " v=" << v;
      } else {
        EXPECT_NEAR(got, want, 1e-8 * (1.0 + std::abs(want))) << g.label << " v=" << v;
      }
    }
  }
}

TEST(GraphConjugate, FenchelEqualityOnGraphStrictOff) {
  Rng rng(17);
  for (const auto& g : oracle::builtin_cases()) {
    for (int k = 0; k < 200; ++k) {
      const double w = rng.uniform(-3.0, 3.0);
      const ResolventPoint rp = g.graph.resolvent_point(1.0, w);
      const double gap = g.graph.primitive(rp.s) + g.graph.conjugate(rp.v) - rp.s * rp.v;
      EXPECT_NEAR(gap, 0.0, 1e-8) << g.label << " s=" << rp.s << " v=" << rp.v;
      // Moving v off beta(s) makes the Fenchel gap strictly positive.
      const oracle::ValueSet set = g.set(rp.s);
      const double off = std::isfinite(set.hi) ? set.hi + 0.5 : set.lo - 0.5;
      if (!std::isfinite(off)) continue;
      const double js = g.graph.primitive(rp.s), jv = g.graph.conjugate(off);
      EXPECT_GT(js + jv - rp.s * off, 1e-12) << g.label;
    }
  }
}

TEST(GraphBg, Examples) {
  const BgPair id = make_identity().bg_pair(4.0);
  EXPECT_NEAR(id.b, 2.0, 1e-14);
  EXPECT_NEAR(id.g, 2.0, 1e-14);
  const BgPair h = make_heaviside().bg_pair(0.5);
  EXPECT_EQ(h.b, 0.0);
  EXPECT_EQ(h.g, 0.5);
  const BgPair sg = make_sign().bg_pair(3.0);
  EXPECT_NEAR(sg.b, 2.0, 1e-14);
  EXPECT_NEAR(sg.g, 1.0, 1e-14);
}

TEST(GraphBg, ExactSplitAndNonexpansive) {
  Rng rng(19);
  for (const auto& g : oracle::builtin_cases()) {
    for (int k = 0; k < 200; ++k) {
      const double v1 = rng.uniform(-5.0, 5.0), v2 = rng.uniform(-5.0, 5.0);
      const BgPair a = g.graph.bg_pair(v1), b = g.graph.bg_pair(v2);
      EXPECT_EQ(a.b + a.g, v1) << g.label;
      EXPECT_LE(std::abs(a.b - b.b), std::abs(v1 - v2) + 1e-12) << g.label;
      EXPECT_LE(std::abs(a.g - b.g), std::abs(v1 - v2) + 1e-12) << g.label;
      EXPECT_GE((a.b - b.b) * (v1 - v2), -1e-12) << g.label;
      EXPECT_GE((a.g - b.g) * (v1 - v2), -1e-12) << g.label;
    }
  }
}

TEST(GraphInverse, HeavisideBecomesWalledDomain) {
  const MonotoneGraph inv = make_heaviside().inverse();
  const Interval at0 = inv.eval_set(0.0);
  EXPECT_EQ(at0.lo, -kInf);
  EXPECT_EQ(at0.hi, 0.0);
  expect_set(inv.eval_set(0.5), 0.0, 0.0);
  EXPECT_EQ(inv.eval_set(1.0).hi, kInf);
  EXPECT_TRUE(inv.eval_set(1.5).empty());
}

TEST(GraphInverse, CubeRootAndInvolution) {
  const MonotoneGraph cube = make_power(4.0);
  const MonotoneGraph inv = cube.inverse();
  for (double v : {-8.0, -1.0, 0.0, 0.125, 27.0}) EXPECT_NEAR(inv.eval_set(v).lo, std::cbrt(v), 1e-10);
  for (const auto& g : oracle::builtin_cases()) {
    const MonotoneGraph back = g.graph.inverse().inverse();
    for (double s : {-0.75, -0.25, 0.0, 0.5, 0.9}) {
      const Interval a = g.graph.eval_set(s), b = back.eval_set(s);
      EXPECT_EQ(a.empty(), b.empty()) << g.label;
      if (!a.empty()) {
        EXPECT_NEAR(a.lo, b.lo, 1e-10) << g.label;
        EXPECT_NEAR(a.hi, b.hi, 1e-10) << g.label;
      }
    }
  }
  const MonotoneGraph idinv = make_identity().inverse();
  expect_set(idinv.eval_set(1.25), 1.25, 1.25);
}

TEST(GraphBuiltins, ParameterValidation) {
  EXPECT_THROW(make_power(1.0), ParameterError);
  EXPECT_THROW(make_power(0.5), ParameterError);
  EXPECT_THROW(make_indicator(0.5, 1.0), ParameterError);
  EXPECT_THROW(make_indicator(-1.0, -0.5), ParameterError);
}

TEST(GraphPiecewise, ClampedRampWithJump) {
  PiecewiseSpec spec;
  spec.breakpoints = {0.0, 1.0};
  spec.pieces = {[](double) { return 0.0; }, [](double s) { return s; }, [](double) { return 2.0; }};
  spec.jumps = {std::nullopt, Interval{1.0, 2.0}};
  const MonotoneGraph g = make_piecewise(spec, "ramp");
  expect_set(g.eval_set(-1.0), 0.0, 0.0);
  expect_set(g.eval_set(0.5), 0.5, 0.5);
  expect_set(g.eval_set(1.0), 1.0, 2.0);
  expect_set(g.eval_set(3.0), 2.0, 2.0);
  // s + s = 1 on the ramp.
  EXPECT_NEAR(g.resolvent(1.0, 1.0), 0.5, 1e-12);
  // Landing on the jump: s = 1 for v in [2, 3].
  EXPECT_NEAR(g.resolvent(1.0, 2.5), 1.0, 1e-12);
}

TEST(GraphPiecewise, RejectsDecreasingPieces) {
  PiecewiseSpec spec;
  spec.breakpoints = {0.0};
  spec.pieces = {[](double) { return 0.0; }, [](double s) { return -s; }};
  EXPECT_THROW(make_piecewise(spec), ParameterError);
  PiecewiseSpec drop;
  drop.breakpoints = {0.0};
  drop.pieces = {[](double) { return 1.0; }, [](double) { return 0.0; }};
  EXPECT_THROW(make_piecewise(drop), ParameterError);
}
