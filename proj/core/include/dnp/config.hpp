#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnp/elliptic_solver.hpp"
#include "dnp/errors.hpp"
#include "dnp/expression.hpp"
#include "dnp/flux_model.hpp"
#include "dnp/mesh.hpp"
#include "dnp/monotone_graph.hpp"
#include "dnp/parabolic_stepper.hpp"

namespace dnp {

/// All problems found while reading a config, each prefixed by its key path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct MeshSpec {
  int dim = 1;
  std::vector<double> extent{0.0, 1.0};  // x0, x1[, y0, y1]
  std::vector<int> cells{64};

  bool operator==(const MeshSpec&) const = default;
};

struct FluxSpec {
  std::string kind = "p_laplacian";  // p_laplacian | sum_p_laplacian | weighted_p_laplacian
  double p = 2.0;
  std::vector<double> ps;
  std::string weight;  // expression in x, y
  double w_min = 1.0;
  double w_max = 1.0;

  bool operator==(const FluxSpec&) const = default;
};

struct GraphSpec {
  std::string kind = "identity";  // identity | power | exponential | logarithm | sign | heaviside | indicator | piecewise
  double r = 2.0;
  double m = 0.0;
  double M = 0.0;
  std::vector<double> breakpoints;
  std::vector<std::string> pieces;  // expressions in s
  std::vector<std::optional<std::pair<double, double>>> jumps;
  std::optional<double> domain_lo;
  std::optional<double> domain_hi;

  bool operator==(const GraphSpec&) const = default;
};

struct ForcingSpec {
  std::string expr;                // closed form in x, y, t; empty with no samples means f = 0
  std::vector<double> times;       // sampled form
  std::vector<std::string> files;  // CSV snapshots, resolved against the config directory

  bool operator==(const ForcingSpec&) const = default;
};

struct DataSpec {
  std::string u0;
  std::string xi0;
  std::string h0;  // generator mode when set
  ForcingSpec f;

  bool operator==(const DataSpec&) const = default;
};

struct DiagnosticsSpec {
  std::vector<double> q;  // empty: defaults
  bool bv = false;
  bool linf = true;
  int entropy_family = 0;
  std::vector<double> entropy_s{0.0, 0.25, 0.5, 1.0};
  std::optional<double> slack_entropy;
  int audit_samples = 10000;
  double tol_inner = 1e-10;
  double tol_cont = 1e-8;
  double tol_res = 1e-8;
  int max_iter = 200;
  int max_stages = 20;

  bool operator==(const DiagnosticsSpec&) const = default;
};

struct OutputSpec {
  std::vector<double> snapshots;
  std::string dir;  // relative to the output root; empty: config file stem
  std::vector<std::string> series;  // ledger entry names written as two-column t/value files
  std::vector<std::string> fields{"u"};  // which of u, xi to write at each snapshot time

  bool operator==(const OutputSpec&) const = default;
};

struct ProblemConfig {
  MeshSpec mesh;
  FluxSpec flux;
  GraphSpec graph;
  double T = 1.0;
  int N = 1;
  DataSpec data;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  std::uint64_t seed = 0;
  std::string manufactured_u;  // exact solution in x, y, t for converge
  std::string elliptic_h;      // right-hand side for the elliptic command
  std::string base_dir = ".";  // not part of the canonical form

  bool operator==(const ProblemConfig&) const = default;
};

/// Reads and validates a JSON config; throws ConfigError listing every problem.
ProblemConfig parse_config(const std::string& path);
ProblemConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
/// Canonical form: every key explicit, defaults filled, keys sorted.
nlohmann::json config_to_json(const ProblemConfig& cfg);
/// FNV-1a 64 of the canonical form, as 16 hex digits.
std::string config_hash(const ProblemConfig& cfg);

Mesh build_mesh(const ProblemConfig& cfg);
FluxModel build_flux(const ProblemConfig& cfg);
MonotoneGraph build_graph(const ProblemConfig& cfg);
EllipticOptions build_solver_options(const ProblemConfig& cfg);
DiscreteField sample_expression(const Mesh& m, const std::string& expr, double t = 0.0);
Forcing build_forcing(const ProblemConfig& cfg, const Mesh& m);

/// Generator mode (data.h0): solves xi0 + A_h u0 = h0. Direct mode: samples u0 and xi0 and checks membership.
std::pair<DiscreteField, DiscreteField> build_initial_pair(const ProblemConfig& cfg);
ProblemSetup build_setup(const ProblemConfig& cfg);

/// Reads a CSV snapshot written by write_csv onto the given mesh.
DiscreteField read_csv_field(const std::string& path, const Mesh& m);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace dnp
