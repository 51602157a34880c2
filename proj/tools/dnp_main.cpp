#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dnp/config.hpp"
#include "dnp/report_writer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kOperational = 1;
constexpr int kAssertion = 2;

fs::path output_root() {
  const char* env = std::getenv("DNP_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::path("dnp_out");
}

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

fs::path out_dir_for(const dnp::ProblemConfig& cfg, const std::string& path, const std::string& suffix = "") {
  const std::string name = cfg.output.dir.empty() ? stem(path) + suffix : cfg.output.dir;
  return output_root() / name;
}

int finish(const std::vector<dnp::LedgerEntry>& ledger, const fs::path& dir) {
  std::size_t asserted = 0, failed = 0;
  for (const auto& e : ledger) {
    if (!e.asserted) continue;
    ++asserted;
    if (e.pass) continue;
    ++failed;
    if (failed <= 20)
      std::cout << "FAIL " << e.name << (e.step >= 0 ? " step " + std::to_string(e.step) : std::string())
                << " lhs=" << dnp::format_real(e.lhs) << " rhs=" << dnp::format_real(e.rhs)
                << " slack=" << dnp::format_real(e.slack) << "\n";
  }
  std::cout << (asserted - failed) << "/" << asserted << " asserted entries pass; output in " << dir.string() << "\n";
  return failed == 0 ? kOk : kAssertion;
}

int cmd_elliptic(const std::string& path) {
  const dnp::ProblemConfig cfg = dnp::parse_config(path);
  const std::string h_text = !cfg.elliptic_h.empty() ? cfg.elliptic_h : cfg.data.h0;
  if (h_text.empty()) throw dnp::Error(path + ": elliptic needs elliptic.h or data.h0");
  const dnp::Mesh m = dnp::build_mesh(cfg);
  dnp::DiscreteField h = dnp::sample_expression(m, h_text);
  h.clamp_boundary();
  const dnp::FluxModel flux = dnp::build_flux(cfg);
  const dnp::EllipticSolution sol = dnp::solve_elliptic(m, flux, dnp::build_graph(cfg), h, dnp::build_solver_options(cfg));
  std::vector<dnp::LedgerEntry> extra;
  if (cfg.diagnostics.linf) extra = dnp::linf_bound_check(sol, h, flux.p, dnp::moser_exponent(m.dim, flux.p));
  const fs::path dir = out_dir_for(cfg, path);
  dnp::write_report(dir.string(), dnp::elliptic_files(sol, extra), dnp::config_hash(cfg));
  std::vector<dnp::LedgerEntry> all = sol.estimate_report;
  all.insert(all.end(), extra.begin(), extra.end());
  return finish(all, dir);
}

int cmd_run(const std::string& path) {
  const dnp::ProblemConfig cfg = dnp::parse_config(path);
  const dnp::ProblemSetup setup = dnp::build_setup(cfg);
  dnp::TrajectoryReport rep = dnp::run(setup);
  if (cfg.diagnostics.entropy_family > 0) {
    const double slack = cfg.diagnostics.slack_entropy ? *cfg.diagnostics.slack_entropy : dnp::default_entropy_slack(rep);
    auto family = dnp::make_test_family(setup.mesh, setup.T, cfg.diagnostics.entropy_family);
    auto entries = dnp::entropy_check(setup, rep, cfg.diagnostics.entropy_s, family, slack);
    rep.ledger.insert(rep.ledger.end(), entries.begin(), entries.end());
  }
  const fs::path dir = out_dir_for(cfg, path);
  dnp::write_report(dir.string(),
                    dnp::trajectory_files(rep, cfg.output.snapshots, cfg.output.fields, cfg.output.series),
                    dnp::config_hash(cfg));
  return finish(rep.ledger, dir);
}

int cmd_compare(const std::string& path1, const std::string& path2) {
  const dnp::ProblemConfig c1 = dnp::parse_config(path1);
  const dnp::ProblemConfig c2 = dnp::parse_config(path2);
  const dnp::CompareReport rep = dnp::compare(dnp::build_setup(c1), dnp::build_setup(c2));
  json r;
  r["all_pass"] = rep.all_pass();
  r["first_all_pass"] = rep.first.all_pass();
  r["second_all_pass"] = rep.second.all_pass();
  r["ledger"] = dnp::ledger_json(rep.ledger);
  const fs::path dir = output_root() / (stem(path1) + "_vs_" + stem(path2));
  dnp::write_report(dir.string(), {{"compare.json", dnp::dump_json(r)}},
                    dnp::fnv1a_hex(dnp::config_hash(c1) + dnp::config_hash(c2)));
  std::vector<dnp::LedgerEntry> all = rep.ledger;
  all.insert(all.end(), rep.first.ledger.begin(), rep.first.ledger.end());
  all.insert(all.end(), rep.second.ledger.begin(), rep.second.ledger.end());
  return finish(all, dir);
}

int cmd_converge(const std::string& path, int levels) {
  if (levels < 2) throw dnp::ParameterError("--ladder needs at least 2 levels");
  const dnp::ProblemConfig cfg = dnp::parse_config(path);
  std::vector<dnp::ProblemSetup> ladder;
  for (int k = 0; k < levels; ++k) {
    dnp::ProblemConfig c = cfg;
    c.N = cfg.N << k;
    for (int& cells : c.mesh.cells) cells = cells << k;
    ladder.push_back(dnp::build_setup(c));
  }
  std::function<double(const dnp::Point&, double)> exact;
  if (!cfg.manufactured_u.empty()) {
    const dnp::Expression e = dnp::Expression::parse(cfg.manufactured_u);
    exact = [e](const dnp::Point& x, double t) { return e({x.x, x.y, t, 0.0}); };
  }
  const auto rows = dnp::convergence_table(ladder, exact);
  json table = json::array();
  std::ostringstream dat;
  dat << "# N cells tau h error order\n";
  std::cout << "N cells tau h error order\n";
  for (const auto& r : rows) {
    table.push_back({{"N", r.N},
                     {"cells", r.cells},
                     {"tau", dnp::format_real(r.tau)},
                     {"h", dnp::format_real(r.h)},
                     {"error", dnp::format_real(r.error)},
                     {"order", dnp::format_real(r.order)}});
    std::ostringstream line;
    line << r.N << ' ' << r.cells << ' ' << dnp::format_real(r.tau) << ' ' << dnp::format_real(r.h) << ' '
         << dnp::format_real(r.error) << ' ' << dnp::format_real(r.order) << '\n';
    dat << line.str();
    std::cout << line.str();
  }
  json r;
  r["reference"] = exact ? "manufactured" : "finest";
  r["rows"] = table;
  const fs::path dir = out_dir_for(cfg, path, "_converge");
  dnp::write_report(dir.string(), {{"converge.json", dnp::dump_json(r)}, {"converge.dat", dat.str()}},
                    dnp::config_hash(cfg));
  std::cout << "output in " << dir.string() << "\n";
  return kOk;
}

int cmd_audit(const std::string& path) {
  const dnp::ProblemConfig cfg = dnp::parse_config(path);
  const dnp::FluxModel flux = dnp::build_flux(cfg);
  const dnp::FluxAudit audit =
      dnp::verify_hypotheses(flux, static_cast<std::size_t>(cfg.diagnostics.audit_samples), cfg.seed, cfg.mesh.dim);
  json checks = json::array();
  for (const auto& c : audit.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " margin=" << dnp::format_real(c.worst_margin) << "\n";
    json o = {{"name", c.name},
              {"pass", c.pass},
              {"worst_margin", dnp::format_real(c.worst_margin)},
              {"worst_ratio", dnp::format_real(c.worst_ratio)},
              {"samples", c.samples}};
    if (!c.pass) o["first_failure"] = c.first_failure;
    checks.push_back(std::move(o));
  }
  json r = {{"model", audit.model},
            {"p", dnp::format_real(flux.p)},
            {"c", dnp::format_real(flux.c)},
            {"C", dnp::format_real(flux.C)},
            {"pass", audit.pass},
            {"checks", checks}};
  const fs::path dir = out_dir_for(cfg, path, "_audit");
  dnp::write_report(dir.string(), {{"audit.json", dnp::dump_json(r)}}, dnp::config_hash(cfg));
  std::cout << "output in " << dir.string() << "\n";
  return audit.pass ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete solver and estimate checker for doubly nonlinear parabolic problems"};
  app.set_version_flag("--version", dnp::tool_version());
  app.require_subcommand(1);

  std::string cfg1, cfg2;
  int ladder = 3;
  auto* elliptic = app.add_subcommand("elliptic", "Solve the stationary problem and check its estimates");
  elliptic->add_option("config", cfg1)->required()->check(CLI::ExistingFile);
  auto* run = app.add_subcommand("run", "Run the implicit scheme and write the estimate ledger");
  run->add_option("config", cfg1)->required()->check(CLI::ExistingFile);
  auto* compare = app.add_subcommand("compare", "Run two configs and check the comparison bounds");
  compare->add_option("config1", cfg1)->required()->check(CLI::ExistingFile);
  compare->add_option("config2", cfg2)->required()->check(CLI::ExistingFile);
  auto* converge = app.add_subcommand("converge", "Refinement study doubling N and cells per level");
  converge->add_option("config", cfg1)->required()->check(CLI::ExistingFile);
  converge->add_option("--ladder", ladder, "number of levels")->check(CLI::Range(2, 12));
  auto* audit = app.add_subcommand("audit-flux", "Sample the structural hypotheses of the configured flux");
  audit->add_option("config", cfg1)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kOperational;
  }

  try {
    if (*elliptic) return cmd_elliptic(cfg1);
    if (*run) return cmd_run(cfg1);
    if (*compare) return cmd_compare(cfg1, cfg2);
    if (*converge) return cmd_converge(cfg1, ladder);
    if (*audit) return cmd_audit(cfg1);
  } catch (const dnp::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kOperational;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOperational;
  }
  return kOperational;
}
