#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnp/elliptic_solver.hpp"
#include "dnp/ledger.hpp"
#include "dnp/mesh.hpp"
#include "dnp/parabolic_stepper.hpp"

namespace dnp {

/// A named output file held in memory until write_report.
struct OutputFile {
  std::string name;
  std::string contents;
};

std::string tool_version();

/// Numbers are written as 17-digit decimal strings so the files round-trip exactly.
nlohmann::json ledger_json(const std::vector<LedgerEntry>& ledger);
/// Two-space indent and a trailing newline.
std::string dump_json(const nlohmann::json& j);

std::string field_csv(const DiscreteField& f);

/// Ledger JSON for an elliptic solve plus u.csv and xi.csv.
std::vector<OutputFile> elliptic_files(const EllipticSolution& sol, const std::vector<LedgerEntry>& extra);

/// ledger.json, one CSV per (snapshot time, field) and one series_<name>.dat per requested ledger name.
/// An empty trajectory (no steps) yields the ledger file only.
std::vector<OutputFile> trajectory_files(const TrajectoryReport& rep, const std::vector<double>& snapshots,
                                         const std::vector<std::string>& fields, const std::vector<std::string>& series);

struct Manifest {
  nlohmann::json json;
  std::string text;
};

/// Writes every file into out_dir (created if missing) followed by manifest.json, which lists
/// each file with its size and FNV-1a digest, the config hash and the tool version. No timestamps.
Manifest write_report(const std::string& out_dir, const std::vector<OutputFile>& files, const std::string& config_hash);

}  // namespace dnp
