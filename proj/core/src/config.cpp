#include "dnp/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <algorithm>
#include <sstream>

namespace dnp {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

// Typed access to one JSON object that records problems instead of throwing.
class Section {
 public:
  Section(const json& root, std::string path, std::vector<std::string>& problems)
      : path_(std::move(path)), problems_(problems) {
    if (root.is_null()) {
      obj_ = json::object();
    } else if (!root.is_object()) {
      problem("", "must be an object");
      obj_ = json::object();
    } else {
      obj_ = root;
    }
  }

  ~Section() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) problem(it.key(), "unknown key");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_[key].is_null();
  }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_[key];
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = obj_[key];
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v == "inf" || v == "-inf")) return v == "inf" ? kInf : -kInf;
    problem(key, "must be a number");
    return def;
  }
  long integer(const std::string& key, long def) {
    if (!has(key)) return def;
    const json& v = obj_[key];
    if (v.is_number_integer()) return v.get<long>();
    problem(key, "must be an integer");
    return def;
  }
  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    if (obj_[key].is_boolean()) return obj_[key].get<bool>();
    problem(key, "must be true or false");
    return def;
  }
  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    if (obj_[key].is_string()) return obj_[key].get<std::string>();
    problem(key, "must be a string");
    return def;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    if (!has(key)) return def;
    const json& v = obj_[key];
    if (!v.is_array()) {
      problem(key, "must be an array of numbers");
      return def;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (e.is_number()) out.push_back(e.get<double>());
      else if (e.is_string() && e == "inf") out.push_back(kInf);
      else {
        problem(key, "must be an array of numbers");
        return def;
      }
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key) {
    if (!has(key)) return {};
    const json& v = obj_[key];
    std::vector<std::string> out;
    if (!v.is_array()) {
      problem(key, "must be an array of strings");
      return out;
    }
    for (const auto& e : v) {
      if (!e.is_string()) {
        problem(key, "must be an array of strings");
        return {};
      }
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  void problem(const std::string& key, const std::string& what) {
    problems_.push_back((key.empty() ? path_ : path_ + "." + key) + ": " + what);
  }
  const std::string& path() const { return path_; }

 private:
  json obj_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

void check_expression(Section& sec, const std::string& key, const std::string& text, const std::string& allowed) {
  if (text.empty()) return;
  try {
    const Expression e = Expression::parse(text);
    for (char v : std::string("xyts"))
      if (allowed.find(v) == std::string::npos && e.uses(v))
        sec.problem(key, std::string("variable '") + v + "' is not available here");
  } catch (const Error& err) {
    sec.problem(key, err.what());
  }
}

json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ProblemConfig config_from_json(const json& j, const std::string& base_dir) {
  std::vector<std::string> problems;
  ProblemConfig cfg;
  cfg.base_dir = base_dir;
  {
    Section root(j, "config", problems);
    for (const char* k : {"mesh", "flux", "graph", "time", "data", "diagnostics", "output", "seed", "manufactured", "elliptic"})
      root.has(k);

    {
      Section s(root.raw("mesh"), "mesh", problems);
      cfg.mesh.dim = static_cast<int>(s.integer("dim", 1));
      if (cfg.mesh.dim != 1 && cfg.mesh.dim != 2) s.problem("dim", "must be 1 or 2");
      const bool two = cfg.mesh.dim == 2;
      cfg.mesh.extent = s.numbers("extent", two ? std::vector<double>{0, 1, 0, 1} : std::vector<double>{0, 1});
      if (cfg.mesh.extent.size() != (two ? 4u : 2u)) s.problem("extent", two ? "needs [x0, x1, y0, y1]" : "needs [x0, x1]");
      for (std::size_t k = 0; k + 1 < cfg.mesh.extent.size(); k += 2)
        if (!(cfg.mesh.extent[k + 1] > cfg.mesh.extent[k]) || !std::isfinite(cfg.mesh.extent[k + 1]) ||
            !std::isfinite(cfg.mesh.extent[k]))
          s.problem("extent", "each axis needs finite lo < hi");
      cfg.mesh.cells.clear();
      if (s.has("cells") && s.raw("cells").is_number_integer()) {
        cfg.mesh.cells.assign(two ? 2 : 1, s.raw("cells").get<int>());
      } else {
        for (double c : s.numbers("cells", two ? std::vector<double>{64, 64} : std::vector<double>{64}))
          cfg.mesh.cells.push_back(static_cast<int>(c));
      }
      if (cfg.mesh.cells.size() != (two ? 2u : 1u)) s.problem("cells", "needs one count per axis");
      for (int c : cfg.mesh.cells)
        if (c < 2) s.problem("cells", "needs at least 2 cells per axis");
    }
    {
      Section s(root.raw("flux"), "flux", problems);
      cfg.flux.kind = s.string("kind", "p_laplacian");
      cfg.flux.p = s.number("p", 2.0);
      cfg.flux.ps = s.numbers("ps", {});
      cfg.flux.weight = s.string("weight", "");
      cfg.flux.w_min = s.number("w_min", 1.0);
      cfg.flux.w_max = s.number("w_max", 1.0);
      if (cfg.flux.kind == "p_laplacian" || cfg.flux.kind == "weighted_p_laplacian") {
        if (!(cfg.flux.p > 1.0) || !std::isfinite(cfg.flux.p)) s.problem("p", "requires 1 < p < inf");
      } else if (cfg.flux.kind == "sum_p_laplacian") {
        if (cfg.flux.ps.empty()) s.problem("ps", "needs at least one exponent");
        for (double p : cfg.flux.ps)
          if (!(p > 1.0) || !std::isfinite(p)) s.problem("ps", "every exponent must satisfy 1 < p < inf");
      } else {
        s.problem("kind", "unknown flux kind '" + cfg.flux.kind + "'");
      }
      if (cfg.flux.kind == "weighted_p_laplacian") {
        if (cfg.flux.weight.empty()) s.problem("weight", "required for weighted_p_laplacian");
        check_expression(s, "weight", cfg.flux.weight, "xy");
        if (!(cfg.flux.w_min > 0.0) || !(cfg.flux.w_max >= cfg.flux.w_min))
          s.problem("w_min", "requires 0 < w_min <= w_max");
      }
    }
    {
      Section s(root.raw("graph"), "graph", problems);
      GraphSpec& g = cfg.graph;
      g.kind = s.string("kind", "identity");
      g.r = s.number("r", 2.0);
      g.m = s.number("m", 0.0);
      g.M = s.number("M", 0.0);
      g.breakpoints = s.numbers("breakpoints", {});
      g.pieces = s.strings("pieces");
      if (s.has("jumps")) {
        const json& js = s.raw("jumps");
        if (!js.is_array()) s.problem("jumps", "must be an array of [lo, hi] or null");
        else
          for (const auto& e : js) {
            if (e.is_null()) g.jumps.emplace_back();
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
              g.jumps.emplace_back(std::make_pair(e[0].get<double>(), e[1].get<double>()));
            else s.problem("jumps", "must be an array of [lo, hi] or null");
          }
      }
      if (s.has("domain")) {
        const json& d = s.raw("domain");
        if (!d.is_array() || d.size() != 2) s.problem("domain", "must be [lo, hi] with null for an open end");
        else {
          if (d[0].is_number()) g.domain_lo = d[0].get<double>();
          if (d[1].is_number()) g.domain_hi = d[1].get<double>();
        }
      }
      static const std::set<std::string> kinds = {"identity", "power",     "exponential", "logarithm",
                                                  "sign",     "heaviside", "indicator",   "piecewise"};
      if (!kinds.count(g.kind)) s.problem("kind", "unknown graph kind '" + g.kind + "'");
      if (g.kind == "power" && (!(g.r > 1.0) || !std::isfinite(g.r))) s.problem("r", "power graph requires r > 1");
      if (g.kind == "indicator" && !(g.m <= 0.0 && g.M >= 0.0 && std::isfinite(g.m) && std::isfinite(g.M)))
        s.problem("m", "indicator graph requires finite m <= 0 <= M");
      if (g.kind == "piecewise") {
        for (const auto& p : g.pieces) check_expression(s, "pieces", p, "s");
        if (g.pieces.size() != g.breakpoints.size() + 1) s.problem("pieces", "needs one more piece than breakpoints");
      }
    }
    {
      Section s(root.raw("time"), "time", problems);
      cfg.T = s.number("T", 1.0);
      cfg.N = static_cast<int>(s.integer("steps", 1));
      if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) s.problem("T", "must be positive and finite");
      if (cfg.N < 1) s.problem("steps", "must be at least 1");
    }
    {
      Section s(root.raw("data"), "data", problems);
      cfg.data.h0 = s.string("h0", "");
      const bool direct = s.has("u0") || s.has("xi0");
      cfg.data.u0 = s.string("u0", cfg.data.h0.empty() ? "0" : "");
      cfg.data.xi0 = s.string("xi0", cfg.data.h0.empty() ? "0" : "");
      if (!cfg.data.h0.empty() && direct) s.problem("h0", "give either h0 or u0/xi0, not both");
      check_expression(s, "u0", cfg.data.u0, "xy");
      check_expression(s, "xi0", cfg.data.xi0, "xy");
      check_expression(s, "h0", cfg.data.h0, "xy");
      if (s.has("f")) {
        const json& f = s.raw("f");
        if (f.is_string()) {
          cfg.data.f.expr = f.get<std::string>();
          check_expression(s, "f", cfg.data.f.expr, "xyt");
        } else {
          Section fs(f, "data.f", problems);
          cfg.data.f.times = fs.numbers("times", {});
          cfg.data.f.files = fs.strings("files");
          if (cfg.data.f.times.empty() || cfg.data.f.times.size() != cfg.data.f.files.size())
            fs.problem("files", "needs one file per sample time");
          for (std::size_t k = 1; k < cfg.data.f.times.size(); ++k)
            if (!(cfg.data.f.times[k] > cfg.data.f.times[k - 1])) fs.problem("times", "must be strictly increasing");
          for (const auto& file : cfg.data.f.files) {
            const auto p = std::filesystem::path(base_dir) / file;
            if (!std::filesystem::exists(p)) fs.problem("files", "missing file " + p.string());
          }
        }
      }
    }
    {
      Section s(root.raw("diagnostics"), "diagnostics", problems);
      DiagnosticsSpec& d = cfg.diagnostics;
      d.q = s.numbers("q", {});
      for (double q : d.q)
        if (!(q >= 1.0)) s.problem("q", "exponents must lie in [1, inf]");
      d.bv = s.boolean("bv", false);
      d.linf = s.boolean("linf", true);
      d.entropy_family = static_cast<int>(s.integer("entropy_family", 0));
      if (d.entropy_family < 0) s.problem("entropy_family", "must be nonnegative");
      d.entropy_s = s.numbers("entropy_s", d.entropy_s);
      if (s.has("slack_entropy")) d.slack_entropy = s.number("slack_entropy", 0.0);
      d.audit_samples = static_cast<int>(s.integer("audit_samples", 10000));
      if (d.audit_samples < 1) s.problem("audit_samples", "must be at least 1");
      Section t(s.raw("tolerances"), "diagnostics.tolerances", problems);
      d.tol_inner = t.number("inner", 1e-10);
      d.tol_cont = t.number("cont", 1e-8);
      d.tol_res = t.number("res", 1e-8);
      d.max_iter = static_cast<int>(t.integer("max_iter", 200));
      d.max_stages = static_cast<int>(t.integer("max_stages", 20));
      if (!(d.tol_inner > 0.0) || !(d.tol_cont > 0.0) || !(d.tol_res > 0.0)) t.problem("", "tolerances must be positive");
      if (d.max_iter < 1 || d.max_stages < 1) t.problem("", "iteration limits must be at least 1");
    }
    {
      Section s(root.raw("output"), "output", problems);
      cfg.output.snapshots = s.numbers("snapshots", {});
      for (double t : cfg.output.snapshots)
        if (!(t >= 0.0 && t <= cfg.T)) s.problem("snapshots", "times must lie in [0, T]");
      cfg.output.dir = s.string("dir", "");
      cfg.output.series = s.strings("series");
      if (s.has("fields")) cfg.output.fields = s.strings("fields");
      for (const auto& f : cfg.output.fields)
        if (f != "u" && f != "xi") s.problem("fields", "entries must be \"u\" or \"xi\"");
    }
    if (root.has("seed")) {
      const json& v = root.raw("seed");
      if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) cfg.seed = v.get<std::uint64_t>();
      else root.problem("seed", "must be a nonnegative integer");
    }
    {
      Section s(root.raw("manufactured"), "manufactured", problems);
      cfg.manufactured_u = s.string("u", "");
      check_expression(s, "u", cfg.manufactured_u, "xyt");
    }
    {
      Section s(root.raw("elliptic"), "elliptic", problems);
      cfg.elliptic_h = s.string("h", "");
      check_expression(s, "h", cfg.elliptic_h, "xy");
    }
  }

  if (problems.empty()) {
    // Constructor-level checks (maximality of piecewise graphs and the like).
    try {
      build_graph(cfg);
    } catch (const Error& e) {
      problems.push_back(std::string("graph: ") + e.what());
    }
    try {
      build_flux(cfg);
    } catch (const Error& e) {
      problems.push_back(std::string("flux: ") + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ProblemConfig parse_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError({e.what()});
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return config_from_json(j, dir.empty() ? "." : dir.string());
}

json config_to_json(const ProblemConfig& cfg) {
  json j;
  j["mesh"] = {{"dim", cfg.mesh.dim}, {"extent", numbers_json(cfg.mesh.extent)}, {"cells", cfg.mesh.cells}};
  j["flux"] = {{"kind", cfg.flux.kind}, {"p", cfg.flux.p}, {"ps", numbers_json(cfg.flux.ps)},
               {"weight", cfg.flux.weight}, {"w_min", cfg.flux.w_min}, {"w_max", cfg.flux.w_max}};
  json jumps = json::array();
  for (const auto& jp : cfg.graph.jumps) jumps.push_back(jp ? json::array({jp->first, jp->second}) : json());
  j["graph"] = {{"kind", cfg.graph.kind},
                {"r", cfg.graph.r},
                {"m", cfg.graph.m},
                {"M", cfg.graph.M},
                {"breakpoints", numbers_json(cfg.graph.breakpoints)},
                {"pieces", cfg.graph.pieces},
                {"jumps", jumps},
                {"domain", json::array({cfg.graph.domain_lo ? json(*cfg.graph.domain_lo) : json(),
                                        cfg.graph.domain_hi ? json(*cfg.graph.domain_hi) : json()})}};
  j["time"] = {{"T", cfg.T}, {"steps", cfg.N}};
  json f;
  if (!cfg.data.f.times.empty()) f = {{"times", numbers_json(cfg.data.f.times)}, {"files", cfg.data.f.files}};
  else f = cfg.data.f.expr.empty() ? json("0") : json(cfg.data.f.expr);
  j["data"] = json::object();
  if (cfg.data.h0.empty()) {
    j["data"]["u0"] = cfg.data.u0;
    j["data"]["xi0"] = cfg.data.xi0;
  } else {
    j["data"]["h0"] = cfg.data.h0;
  }
  j["data"]["f"] = f;
  const auto& d = cfg.diagnostics;
  j["diagnostics"] = {{"q", numbers_json(d.q)},
                      {"bv", d.bv},
                      {"linf", d.linf},
                      {"entropy_family", d.entropy_family},
                      {"entropy_s", numbers_json(d.entropy_s)},
                      {"slack_entropy", d.slack_entropy ? json(*d.slack_entropy) : json()},
                      {"audit_samples", d.audit_samples},
                      {"tolerances",
                       {{"inner", d.tol_inner}, {"cont", d.tol_cont}, {"res", d.tol_res}, {"max_iter", d.max_iter},
                        {"max_stages", d.max_stages}}}};
  j["output"] = {{"snapshots", numbers_json(cfg.output.snapshots)}, {"dir", cfg.output.dir}, {"series", cfg.output.series},
                 {"fields", cfg.output.fields}};
  j["seed"] = cfg.seed;
  j["manufactured"] = {{"u", cfg.manufactured_u}};
  j["elliptic"] = {{"h", cfg.elliptic_h}};
  return j;
}

std::string config_hash(const ProblemConfig& cfg) {
  json j = config_to_json(cfg);
  // The output location does not change what is computed.
  j["output"].erase("dir");
  return fnv1a_hex(j.dump());
}

Mesh build_mesh(const ProblemConfig& cfg) {
  const auto& e = cfg.mesh.extent;
  if (cfg.mesh.dim == 2) return Mesh::rectangle(e[0], e[1], e[2], e[3], cfg.mesh.cells[0], cfg.mesh.cells[1]);
  return Mesh::interval(e[0], e[1], cfg.mesh.cells[0]);
}

FluxModel build_flux(const ProblemConfig& cfg) {
  const FluxSpec& f = cfg.flux;
  if (f.kind == "sum_p_laplacian") return make_sum_p_laplacian(f.ps);
  if (f.kind == "weighted_p_laplacian") {
    const Expression w = Expression::parse(f.weight);
    const double lo = f.w_min, hi = f.w_max;
    auto weight = [w, lo, hi](const Point& x) {
      const double v = w({x.x, x.y, 0.0, 0.0});
      if (!(v >= lo && v <= hi)) throw DomainError("weight " + std::to_string(v) + " outside [w_min, w_max]");
      return v;
    };
    return make_weighted_p_laplacian(f.p, weight, lo, hi);
  }
  if (f.kind == "p_laplacian") return make_p_laplacian(f.p);
  throw ParameterError("unknown flux kind " + f.kind);
}

MonotoneGraph build_graph(const ProblemConfig& cfg) {
  const GraphSpec& g = cfg.graph;
  if (g.kind == "identity") return make_identity();
  if (g.kind == "power") return make_power(g.r);
  if (g.kind == "exponential") return make_exponential();
  if (g.kind == "logarithm") return make_logarithm();
  if (g.kind == "sign") return make_sign();
  if (g.kind == "heaviside") return make_heaviside();
  if (g.kind == "indicator") return make_indicator(g.m, g.M);
  if (g.kind == "piecewise") {
    PiecewiseSpec spec;
    spec.breakpoints = g.breakpoints;
    for (const auto& text : g.pieces) {
      const Expression e = Expression::parse(text);
      spec.pieces.push_back([e](double s) { return e({0.0, 0.0, 0.0, s}); });
    }
    for (const auto& jp : g.jumps) {
      if (jp) spec.jumps.push_back(Interval{jp->first, jp->second});
      else spec.jumps.emplace_back();
    }
    if (g.domain_lo) spec.domain_lo = *g.domain_lo;
    if (g.domain_hi) spec.domain_hi = *g.domain_hi;
    return make_piecewise(spec, "piecewise");
  }
  throw ParameterError("unknown graph kind " + g.kind);
}

EllipticOptions build_solver_options(const ProblemConfig& cfg) {
  EllipticOptions o;
  const auto& d = cfg.diagnostics;
  o.tol_inner = d.tol_inner;
  o.tol_cont = d.tol_cont;
  o.tol_res = d.tol_res;
  o.max_iter = d.max_iter;
  o.max_stages = d.max_stages;
  o.q_values = d.q;
  o.check_tv = d.bv;
  return o;
}

DiscreteField sample_expression(const Mesh& m, const std::string& expr, double t) {
  if (expr.empty()) return DiscreteField(m);
  const Expression e = Expression::parse(expr);
  return DiscreteField::sample(m, [&](const Point& x) { return e({x.x, x.y, t, 0.0}); });
}

DiscreteField read_csv_field(const std::string& path, const Mesh& m) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  const std::string expect = m.dim == 2 ? "x,y,value" : "x,value";
  if (line != expect) throw Error(path + ": expected header '" + expect + "'");
  DiscreteField f(m);
  std::size_t k = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (k >= m.size()) throw Error(path + ": more rows than mesh nodes");
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    if (cols.size() != static_cast<std::size_t>(m.dim + 1)) throw Error(path + ": wrong column count");
    const Point p = m.node(k);
    const double tol = 1e-9 * std::max(1.0, std::abs(m.x1) + std::abs(m.y1));
    if (std::abs(cols[0] - p.x) > tol || (m.dim == 2 && std::abs(cols[1] - p.y) > tol))
      throw Error(path + ": node coordinates do not match the mesh at row " + std::to_string(k + 2));
    f.values[k++] = cols.back();
  }
  if (k != m.size()) throw Error(path + ": fewer rows than mesh nodes");
  return f;
}

Forcing build_forcing(const ProblemConfig& cfg, const Mesh& m) {
  const ForcingSpec& f = cfg.data.f;
  if (!f.times.empty()) {
    std::vector<DiscreteField> fields;
    for (const auto& file : f.files) fields.push_back(read_csv_field((std::filesystem::path(cfg.base_dir) / file).string(), m));
    return Forcing::sampled(f.times, std::move(fields));
  }
  if (f.expr.empty()) return Forcing();
  const Expression e = Expression::parse(f.expr);
  return Forcing::closed_form([e](const Point& x, double t) { return e({x.x, x.y, t, 0.0}); });
}

std::pair<DiscreteField, DiscreteField> build_initial_pair(const ProblemConfig& cfg) {
  const Mesh m = build_mesh(cfg);
  const FluxModel flux = build_flux(cfg);
  const MonotoneGraph beta = build_graph(cfg);
  if (!cfg.data.h0.empty()) {
    DiscreteField h0 = sample_expression(m, cfg.data.h0);
    h0.clamp_boundary();
    return initial_pair_from_generator(m, flux, beta, h0, build_solver_options(cfg));
  }
  DiscreteField u0 = sample_expression(m, cfg.data.u0);
  DiscreteField xi0 = sample_expression(m, cfg.data.xi0);
  u0.clamp_boundary();
  xi0.clamp_boundary();
  validate_initial_pair(beta, u0, xi0);
  return {std::move(u0), std::move(xi0)};
}

ProblemSetup build_setup(const ProblemConfig& cfg) {
  ProblemSetup s;
  s.mesh = build_mesh(cfg);
  s.flux = build_flux(cfg);
  s.beta = build_graph(cfg);
  s.T = cfg.T;
  s.N = cfg.N;
  auto [u0, xi0] = build_initial_pair(cfg);
  s.u0 = std::move(u0);
  s.xi0 = std::move(xi0);
  s.f = build_forcing(cfg, s.mesh);
  s.solver = build_solver_options(cfg);
  s.q_values = cfg.diagnostics.q;
  s.bv_check = cfg.diagnostics.bv;
  s.linf_check = cfg.diagnostics.linf;
  return s;
}

}  // namespace dnp
