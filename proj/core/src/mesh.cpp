#include "dnp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "dnp/errors.hpp"

namespace dnp {

Mesh Mesh::interval(double x0, double x1, int cells) {
  if (cells < 2) throw ParameterError("mesh needs at least 2 cells per axis");
  if (!(x1 > x0) || !std::isfinite(x0) || !std::isfinite(x1)) throw ParameterError("mesh extent must be a finite nonempty interval");
  Mesh m;
  m.dim = 1;
  m.x0 = x0;
  m.x1 = x1;
  m.y0 = m.y1 = 0.0;
  m.nx = cells + 1;
  m.ny = 1;
  m.hx = (x1 - x0) / cells;
  m.hy = 1.0;
  return m;
}

Mesh Mesh::rectangle(double x0, double x1, double y0, double y1, int cells_x, int cells_y) {
  Mesh m = interval(x0, x1, cells_x);
  const Mesh my = interval(y0, y1, cells_y);
  m.dim = 2;
  m.y0 = y0;
  m.y1 = y1;
  m.ny = my.nx;
  m.hy = my.hx;
  return m;
}

Point Mesh::node(std::size_t k) const {
  const int i = static_cast<int>(k % nx);
  const int j = static_cast<int>(k / nx);
  return {x0 + i * hx, dim == 2 ? y0 + j * hy : 0.0};
}

bool Mesh::on_boundary(std::size_t k) const {
  const int i = static_cast<int>(k % nx);
  const int j = static_cast<int>(k / nx);
  if (i == 0 || i == nx - 1) return true;
  return dim == 2 && (j == 0 || j == ny - 1);
}

std::vector<std::size_t> Mesh::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size(); ++k)
    if (!on_boundary(k)) out.push_back(k);
  return out;
}

std::vector<std::size_t> Mesh::boundary_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size(); ++k)
    if (on_boundary(k)) out.push_back(k);
  return out;
}

double Mesh::volume(std::size_t k) const {
  const int i = static_cast<int>(k % nx);
  const int j = static_cast<int>(k / nx);
  double w = (i == 0 || i == nx - 1) ? 0.5 * hx : hx;
  if (dim == 2) w *= (j == 0 || j == ny - 1) ? 0.5 * hy : hy;
  return w;
}

double Mesh::measure() const { return dim == 2 ? (x1 - x0) * (y1 - y0) : x1 - x0; }

DiscreteField DiscreteField::sample(const Mesh& m, const std::function<double(const Point&)>& f) {
  DiscreteField out(m);
  for (std::size_t k = 0; k < m.size(); ++k) out.values[k] = f(m.node(k));
  return out;
}

void DiscreteField::clamp_boundary() {
  for (std::size_t k = 0; k < size(); ++k)
    if (mesh.on_boundary(k)) values[k] = 0.0;
}

bool DiscreteField::vanishes_on_boundary() const {
  for (std::size_t k = 0; k < size(); ++k)
    if (mesh.on_boundary(k) && values[k] != 0.0) return false;
  return true;
}

void check_same_mesh(const Mesh& a, const Mesh& b, const char* what) {
  if (!(a == b)) throw PreconditionError(std::string("mesh mismatch in ") + what);
}

std::vector<GradientTerm> gradient_terms(const Mesh& m) {
  std::vector<GradientTerm> terms;
  if (m.dim == 1) {
    terms.reserve(m.nx - 1);
    for (int i = 0; i + 1 < m.nx; ++i) {
      GradientTerm t;
      t.weight = m.hx;
      t.x = {m.x0 + (i + 0.5) * m.hx, 0.0};
      t.count = 2;
      t.nodes = {m.index(i), m.index(i + 1), 0};
      t.cx = {-1.0 / m.hx, 1.0 / m.hx, 0.0};
      terms.push_back(t);
    }
    return terms;
  }
  terms.reserve(4 * static_cast<std::size_t>(m.nx - 1) * (m.ny - 1));
  const double w = 0.25 * m.hx * m.hy;
  for (int j = 0; j + 1 < m.ny; ++j) {
    for (int i = 0; i + 1 < m.nx; ++i) {
      const Point center{m.x0 + (i + 0.5) * m.hx, m.y0 + (j + 0.5) * m.hy};
      for (int cj = 0; cj < 2; ++cj) {
        for (int ci = 0; ci < 2; ++ci) {
          // Corner (i+ci, j+cj); its x-neighbour and y-neighbour inside the cell.
          const double sx = ci == 0 ? 1.0 : -1.0;
          const double sy = cj == 0 ? 1.0 : -1.0;
          GradientTerm t;
          t.weight = w;
          t.x = center;
          t.count = 3;
          t.nodes = {m.index(i + ci, j + cj), m.index(i + 1 - ci, j + cj), m.index(i + ci, j + 1 - cj)};
          t.cx = {-sx / m.hx, sx / m.hx, 0.0};
          t.cy = {-sy / m.hy, 0.0, sy / m.hy};
          terms.push_back(t);
        }
      }
    }
  }
  return terms;
}

double energy(const Mesh& m, const FluxModel& flux, const DiscreteField& u) {
  check_same_mesh(m, u.mesh, "energy");
  double e = 0.0;
  for (const auto& t : gradient_terms(m)) e += t.weight * flux.potential(t.x, t.gradient(u.values));
  return e;
}

DiscreteField apply_operator(const Mesh& m, const FluxModel& flux, const DiscreteField& u) {
  check_same_mesh(m, u.mesh, "apply_operator");
  DiscreteField out(m);
  for (const auto& t : gradient_terms(m)) {
    const Vec2 a = flux.flux(t.x, t.gradient(u.values));
    for (int k = 0; k < t.count; ++k) out.values[t.nodes[k]] += t.weight * (a[0] * t.cx[k] + a[1] * t.cy[k]);
  }
  for (std::size_t k = 0; k < m.size(); ++k) out.values[k] = m.on_boundary(k) ? 0.0 : out.values[k] / m.volume(k);
  return out;
}

std::vector<HessianEntry> energy_hessian(const Mesh& m, const FluxModel& flux, const DiscreteField& u, double floor) {
  check_same_mesh(m, u.mesh, "energy_hessian");
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> slot(m.size(), kNone);
  std::size_t n = 0;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (!m.on_boundary(k)) slot[k] = n++;
  std::vector<HessianEntry> out;
  const auto terms = gradient_terms(m);
  out.reserve(terms.size() * 9);
  for (const auto& t : terms) {
    const Sym2 J = flux.jacobian(t.x, t.gradient(u.values), floor);
    for (int a = 0; a < t.count; ++a) {
      if (slot[t.nodes[a]] == kNone) continue;
      for (int b = 0; b < t.count; ++b) {
        if (slot[t.nodes[b]] == kNone) continue;
        const double v = t.cx[a] * (J[0] * t.cx[b] + J[1] * t.cy[b]) + t.cy[a] * (J[1] * t.cx[b] + J[2] * t.cy[b]);
        out.push_back({slot[t.nodes[a]], slot[t.nodes[b]], t.weight * v});
      }
    }
  }
  return out;
}

double lq_norm(const DiscreteField& f, double q) {
  if (!(q >= 1.0)) throw ParameterError("norm exponent must lie in [1, inf]");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (q == 1.0) {
    for (std::size_t k = 0; k < f.size(); ++k) s += f.mesh.volume(k) * std::abs(f.values[k]);
    return s;
  }
  // Scale by the max so large q neither underflows nor overflows.
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  if (m == 0.0 || !std::isfinite(m)) return m;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double a = std::abs(f.values[k]) / m;
    if (a > 0.0) s += f.mesh.volume(k) * (q == 2.0 ? a * a : std::pow(a, q));
  }
  return m * std::pow(s, 1.0 / q);
}

double inner(const DiscreteField& a, const DiscreteField& b) {
  check_same_mesh(a.mesh, b.mesh, "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.mesh.volume(k) * a.values[k] * b.values[k];
  return s;
}

double positive_mass(const DiscreteField& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    if (f.values[k] > 0.0) s += f.mesh.volume(k) * f.values[k];
  return s;
}

double total_variation(const DiscreteField& f) {
  const Mesh& m = f.mesh;
  auto wy = [&](int j) { return m.dim == 1 ? 1.0 : ((j == 0 || j == m.ny - 1) ? 0.5 * m.hy : m.hy); };
  auto wx = [&](int i) { return (i == 0 || i == m.nx - 1) ? 0.5 * m.hx : m.hx; };
  double tv = 0.0;
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i + 1 < m.nx; ++i) tv += wy(j) * std::abs(f[m.index(i + 1, j)] - f[m.index(i, j)]);
  if (m.dim == 2)
    for (int j = 0; j + 1 < m.ny; ++j)
      for (int i = 0; i < m.nx; ++i) tv += wx(i) * std::abs(f[m.index(i, j + 1)] - f[m.index(i, j)]);
  return tv;
}

double gradient_power_sum(const Mesh& m, const DiscreteField& u, double p) {
  check_same_mesh(m, u.mesh, "gradient_power_sum");
  double s = 0.0;
  for (const auto& t : gradient_terms(m)) s += t.weight * std::pow(norm(t.gradient(u.values)), p);
  return s;
}

DiscreteField operator-(const DiscreteField& a, const DiscreteField& b) {
  check_same_mesh(a.mesh, b.mesh, "difference");
  DiscreteField out(a.mesh);
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] = a.values[k] - b.values[k];
  return out;
}

DiscreteField operator+(const DiscreteField& a, const DiscreteField& b) {
  check_same_mesh(a.mesh, b.mesh, "sum");
  DiscreteField out(a.mesh);
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] = a.values[k] + b.values[k];
  return out;
}

DiscreteField operator*(double s, const DiscreteField& a) {
  DiscreteField out(a.mesh);
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] = s * a.values[k];
  return out;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

void write_csv(std::ostream& os, const DiscreteField& f) {
  const Mesh& m = f.mesh;
  os << (m.dim == 2 ? "x,y,value\n" : "x,value\n");
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Point p = m.node(k);
    os << format_real(p.x) << ',';
    if (m.dim == 2) os << format_real(p.y) << ',';
    os << format_real(f[k]) << '\n';
  }
}

}  // namespace dnp
