#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnp/config.hpp"
#include "dnp/expression.hpp"
#include "dnp/report_writer.hpp"

using namespace dnp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("dnp_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(counter++) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::vector<std::string> problems_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems)
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

json stefan_json() {
  return json::parse(R"json({
    "mesh": {"dim": 1, "extent": [0, 1], "cells": 32},
    "graph": {"kind": "heaviside"},
    "time": {"T": 0.05, "steps": 10},
    "data": {"u0": "0", "xi0": "ind(0.4, 0.6, x)", "f": "0.5 + 0.5*sin(3*x + t)"},
    "diagnostics": {"q": [1, 2, "inf"], "bv": true},
    "output": {"snapshots": [0, 0.025, 0.05], "series": ["xi_lq_step[q=1]"]}
  })json");
}

}  // namespace

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2*3")({}), 7.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")({}), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-2^2")({}), -4.0);
  EXPECT_NEAR(Expression::parse("sin(pi*x)")({0.5, 0, 0, 0}), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(Expression::parse("max(x, y) + min(t, s)")({1, 2, 3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(Expression::parse("if(x - 0.5, 1, 2)")({0.7, 0, 0, 0}), 1.0);
}

TEST(Expression, IndicatorIsOpen) {
  const Expression e = Expression::parse("ind(0.4, 0.6, x)");
  EXPECT_EQ(e({0.4, 0, 0, 0}), 0.0);
  EXPECT_EQ(e({0.5, 0, 0, 0}), 1.0);
  EXPECT_EQ(e({0.6, 0, 0, 0}), 0.0);
}

TEST(Expression, ErrorsAndVariables) {
  EXPECT_THROW(Expression::parse("1 +"), ParameterError);
  EXPECT_THROW(Expression::parse("foo(1)"), ParameterError);
  EXPECT_THROW(Expression::parse("(1"), ParameterError);
  EXPECT_THROW(Expression::parse("log(x)")({0, 0, 0, 0}), DomainError);
  EXPECT_THROW(Expression::parse("1/x")({0, 0, 0, 0}), DomainError);
  const Expression e = Expression::parse("x*t");
  EXPECT_TRUE(e.uses('x'));
  EXPECT_TRUE(e.uses('t'));
  EXPECT_FALSE(e.uses('y'));
}

TEST(Config, MinimalGetsDefaults) {
  const ProblemConfig c = config_from_json(json::parse(R"json({"time": {"T": 0.5, "steps": 4}})json"));
  EXPECT_EQ(c.mesh.dim, 1);
  EXPECT_EQ(c.flux.kind, "p_laplacian");
  EXPECT_EQ(c.flux.p, 2.0);
  EXPECT_EQ(c.graph.kind, "identity");
  EXPECT_EQ(c.T, 0.5);
  EXPECT_EQ(c.N, 4);
  EXPECT_EQ(c.diagnostics.audit_samples, 10000);
  EXPECT_EQ(c.output.fields, std::vector<std::string>{"u"});
}

TEST(Config, ZeroStepsRejected) {
  const auto p = problems_of(json::parse(R"json({"time": {"T": 1, "steps": 0}})json"));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_TRUE(mentions(p, "time.steps"));
}

TEST(Config, PowerExponentRejected) {
  EXPECT_TRUE(mentions(problems_of(json::parse(R"json({"graph": {"kind": "power", "r": 1}})json")), "graph.r"));
}

TEST(Config, CollectsEveryProblem) {
  const auto p = problems_of(json::parse(R"json({
    "graph": {"kind": "power", "r": 0.5},
    "time": {"T": -1, "steps": 0},
    "flux": {"kind": "warp"},
    "bogus": 1,
    "data": {"xi0": "sin(x) + t"}
  })json"));
  EXPECT_TRUE(mentions(p, "graph.r"));
  EXPECT_TRUE(mentions(p, "time.T"));
  EXPECT_TRUE(mentions(p, "time.steps"));
  EXPECT_TRUE(mentions(p, "flux.kind"));
  EXPECT_TRUE(mentions(p, "bogus: unknown key"));
  EXPECT_TRUE(mentions(p, "data.xi0"));
  EXPECT_GE(p.size(), 6u);
}

TEST(Config, MalformedJsonIsConfigError) {
  TempDir d;
  spit(d.path() / "bad.json", "{\"time\": {\"T\": 1,,}}");
  EXPECT_THROW(parse_config((d.path() / "bad.json").string()), ConfigError);
  EXPECT_THROW(parse_config((d.path() / "absent.json").string()), ConfigError);
}

TEST(Config, InfinityAccepted) {
  const ProblemConfig c = config_from_json(stefan_json());
  ASSERT_EQ(c.diagnostics.q.size(), 3u);
  EXPECT_TRUE(std::isinf(c.diagnostics.q[2]));
}

TEST(Config, CanonicalFormRoundTrips) {
  const ProblemConfig c = config_from_json(stefan_json());
  const json canon = config_to_json(c);
  const ProblemConfig back = config_from_json(canon);
  EXPECT_EQ(back, c);
  EXPECT_EQ(config_to_json(back), canon);
}

TEST(Config, HashTracksContentOnly) {
  const ProblemConfig a = config_from_json(stefan_json());
  json j = stefan_json();
  j["output"]["dir"] = "elsewhere";
  EXPECT_EQ(config_hash(config_from_json(j)), config_hash(a));
  json k = stefan_json();
  k["time"]["steps"] = 20;
  EXPECT_NE(config_hash(config_from_json(k)), config_hash(a));
  // Key order in the source text does not matter.
  const json reordered = json::parse(R"json({
    "output": {"series": ["xi_lq_step[q=1]"], "snapshots": [0, 0.025, 0.05]},
    "diagnostics": {"bv": true, "q": [1, 2, "inf"]},
    "data": {"f": "0.5 + 0.5*sin(3*x + t)", "xi0": "ind(0.4, 0.6, x)", "u0": "0"},
    "time": {"steps": 10, "T": 0.05},
    "graph": {"kind": "heaviside"},
    "mesh": {"cells": 32, "extent": [0, 1], "dim": 1}
  })json");
  EXPECT_EQ(config_hash(config_from_json(reordered)), config_hash(a));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, DirectModeHeavisidePair) {
  json j = stefan_json();
  j["data"] = {{"u0", "0"}, {"xi0", "0.5"}};
  const auto [u0, xi0] = build_initial_pair(config_from_json(j));
  EXPECT_EQ(lq_norm(u0, kInf), 0.0);
  EXPECT_EQ(xi0[0], 0.0);
  EXPECT_EQ(xi0[5], 0.5);
}

TEST(Config, DirectModeMembershipViolation) {
  json j = stefan_json();
  j["graph"] = {{"kind", "identity"}};
  j["data"] = {{"u0", "1"}, {"xi0", "0"}};
  EXPECT_THROW(build_initial_pair(config_from_json(j)), MembershipError);
}

TEST(Config, GeneratorModeZeroData) {
  json j = stefan_json();
  j["data"] = {{"h0", "0"}};
  const auto [u0, xi0] = build_initial_pair(config_from_json(j));
  EXPECT_EQ(lq_norm(u0, kInf), 0.0);
  EXPECT_EQ(lq_norm(xi0, kInf), 0.0);
  json both = j;
  both["data"]["u0"] = "0";
  EXPECT_TRUE(mentions(problems_of(both), "data.h0"));
}

TEST(Config, SampledForcingFromCsv) {
  TempDir d;
  const Mesh m = Mesh::interval(0, 1, 4);
  spit(d.path() / "f0.csv", field_csv(DiscreteField(m, 1.0)));
  spit(d.path() / "f1.csv", field_csv(DiscreteField::sample(m, [](const Point& x) { return 3.0 * x.x; })));
  json j = json::parse(R"json({"mesh": {"cells": 4}, "time": {"T": 1, "steps": 2}})json");
  j["data"]["f"] = {{"times", {0.0, 1.0}}, {"files", {"f0.csv", "f1.csv"}}};
  spit(d.path() / "cfg.json", j.dump());
  const ProblemConfig c = parse_config((d.path() / "cfg.json").string());
  const Forcing f = build_forcing(c, m);
  EXPECT_DOUBLE_EQ(f.at(m, 0.5)[2], 0.5 * 1.0 + 0.5 * 1.5);
  EXPECT_EQ(f.at(m, 0.5)[0], 0.0);

  j["data"]["f"]["files"] = {"f0.csv", "nope.csv"};
  spit(d.path() / "cfg2.json", j.dump());
  try {
    parse_config((d.path() / "cfg2.json").string());
    FAIL() << "missing file accepted";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e.problems(), "missing file"));
  }
}

TEST(Csv, RoundTrip) {
  TempDir d;
  const Mesh m = Mesh::rectangle(0, 1, 0, 2, 3, 2);
  const DiscreteField f = DiscreteField::sample(m, [](const Point& x) { return std::exp(x.x) / 3.0 - x.y; });
  spit(d.path() / "f.csv", field_csv(f));
  const DiscreteField g = read_csv_field((d.path() / "f.csv").string(), m);
  EXPECT_EQ(g.values, f.values);
  EXPECT_EQ(slurp(d.path() / "f.csv").substr(0, 10), "x,y,value\n");
  EXPECT_THROW(read_csv_field((d.path() / "f.csv").string(), Mesh::interval(0, 1, 5)), Error);
}

TEST(Report, EmptyTrajectoryWritesLedgerOnly) {
  TempDir d;
  TrajectoryReport rep;
  const auto files = trajectory_files(rep, {}, {"u"}, {});
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].name, "ledger.json");
  const Manifest man = write_report(d.path().string(), files, "0000000000000000");
  ASSERT_EQ(man.json["files"].size(), 1u);
  EXPECT_EQ(man.json["files"][0]["name"], "ledger.json");
  EXPECT_TRUE(fs::exists(d.path() / "manifest.json"));
}

TEST(Report, SnapshotsSeriesAndStableBytes) {
  const ProblemConfig c = config_from_json(stefan_json());
  const TrajectoryReport rep = run(build_setup(c));
  const auto files = trajectory_files(rep, c.output.snapshots, c.output.fields, c.output.series);
  std::size_t csv = 0, dat = 0;
  for (const auto& f : files) {
    csv += f.name.ends_with(".csv");
    dat += f.name.ends_with(".dat");
  }
  EXPECT_EQ(csv, 3u);
  EXPECT_EQ(dat, 1u);

  TempDir a, b;
  const Manifest ma = write_report(a.path().string(), files, config_hash(c));
  const TrajectoryReport again = run(build_setup(c));
  const Manifest mb = write_report(b.path().string(), trajectory_files(again, c.output.snapshots, c.output.fields,
                                                                        c.output.series), config_hash(c));
  EXPECT_EQ(ma.text, mb.text);
  EXPECT_EQ(slurp(a.path() / "manifest.json"), slurp(b.path() / "manifest.json"));
  EXPECT_EQ(ma.json["config_hash"], config_hash(c));
  EXPECT_EQ(ma.json["version"], tool_version());
  for (const auto& f : ma.json["files"]) {
    const std::string body = slurp(a.path() / f["name"].get<std::string>());
    EXPECT_EQ(f["bytes"].get<std::size_t>(), body.size());
    EXPECT_EQ(f["fnv1a64"].get<std::string>(), fnv1a_hex(body));
  }
  EXPECT_THROW(trajectory_files(rep, {}, {"u"}, {"no_such_entry"}), PreconditionError);
}

TEST(Report, LedgerNumbersAreExactStrings) {
  const std::vector<LedgerEntry> l = {bound_entry("x", 1, 0.1, 1.0 / 3.0, 0.0)};
  const json j = ledger_json(l);
  EXPECT_EQ(j[0]["lhs"], "0.10000000000000001");
  EXPECT_EQ(j[0]["rhs"], "0.33333333333333331");
}
