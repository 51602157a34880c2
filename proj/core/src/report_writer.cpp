#include "dnp/report_writer.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnp/config.hpp"
#include "dnp/errors.hpp"

namespace dnp {

using nlohmann::json;

std::string tool_version() { return DNP_VERSION_STRING; }

json ledger_json(const std::vector<LedgerEntry>& ledger) {
  json a = json::array();
  for (const auto& e : ledger) {
    json o;
    o["name"] = e.name;
    o["step"] = e.step;
    o["lhs"] = format_real(e.lhs);
    o["rhs"] = format_real(e.rhs);
    o["slack"] = format_real(e.slack);
    o["pass"] = e.pass;
    o["asserted"] = e.asserted;
    a.push_back(std::move(o));
  }
  return a;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string field_csv(const DiscreteField& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

std::vector<OutputFile> elliptic_files(const EllipticSolution& sol, const std::vector<LedgerEntry>& extra) {
  std::vector<LedgerEntry> all = sol.estimate_report;
  all.insert(all.end(), extra.begin(), extra.end());
  json r;
  r["all_pass"] = all_asserted_pass(all);
  r["iterations"] = sol.iterations;
  r["stages"] = sol.stages;
  r["continuation_converged"] = sol.continuation_converged;
  r["ledger"] = ledger_json(all);
  return {{"ledger.json", dump_json(r)}, {"u.csv", field_csv(sol.u)}, {"xi.csv", field_csv(sol.xi)}};
}

std::vector<OutputFile> trajectory_files(const TrajectoryReport& rep, const std::vector<double>& snapshots,
                                         const std::vector<std::string>& fields, const std::vector<std::string>& series) {
  json r;
  r["all_pass"] = rep.all_pass();
  r["T"] = format_real(rep.T);
  r["steps"] = rep.N;
  r["lipschitz_constant"] = format_real(rep.lipschitz_constant);
  r["ledger"] = ledger_json(rep.ledger);
  std::vector<OutputFile> out{{"ledger.json", dump_json(r)}};
  if (rep.u.empty() || rep.N < 1) return out;

  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const double t = snapshots[k];
    char tag[32];
    std::snprintf(tag, sizeof tag, "%03zu", k);
    for (const auto& f : fields) {
      const DiscreteField& v = f == "xi" ? rep.pi_xi(t) : rep.pi_u(t);
      out.push_back({"snapshot_" + std::string(tag) + "_" + f + ".csv", field_csv(v)});
    }
  }
  for (const auto& name : series) {
    std::ostringstream os;
    os << "# t " << name << "\n";
    bool any = false;
    for (const auto& e : rep.ledger) {
      if (e.name != name || e.step < 0) continue;
      os << format_real(e.step * rep.tau()) << ' ' << format_real(e.lhs) << '\n';
      any = true;
    }
    if (!any) throw PreconditionError("no per-step ledger entries named " + name);
    std::string file = name;
    for (char& c : file)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
    out.push_back({"series_" + file + ".dat", os.str()});
  }
  return out;
}

Manifest write_report(const std::string& out_dir, const std::vector<OutputFile>& files, const std::string& config_hash) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create " + out_dir + ": " + ec.message());
  json list = json::array();
  for (const auto& f : files) {
    const fs::path p = fs::path(out_dir) / f.name;
    std::ofstream os(p, std::ios::binary);
    os << f.contents;
    if (!os) throw Error("cannot write " + p.string());
    list.push_back({{"name", f.name}, {"bytes", f.contents.size()}, {"fnv1a64", fnv1a_hex(f.contents)}});
  }
  Manifest m;
  m.json = {{"tool", "dnp"}, {"version", tool_version()}, {"config_hash", config_hash}, {"files", list}};
  m.text = dump_json(m.json);
  const fs::path p = fs::path(out_dir) / "manifest.json";
  std::ofstream os(p, std::ios::binary);
  os << m.text;
  if (!os) throw Error("cannot write " + p.string());
  return m;
}

}  // namespace dnp
