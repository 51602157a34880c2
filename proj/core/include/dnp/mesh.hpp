#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dnp/flux_model.hpp"

namespace dnp {

/// Uniform structured grid on an interval or an axis-aligned rectangle.
/// Nodes are numbered k = i + nx * j; boundary nodes carry the Dirichlet condition.
struct Mesh {
  int dim = 1;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 0.0;
  int nx = 2, ny = 1;  // node counts
  double hx = 1.0, hy = 1.0;

  static Mesh interval(double x0, double x1, int cells);
  static Mesh rectangle(double x0, double x1, double y0, double y1, int cells_x, int cells_y);

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j; }
  Point node(std::size_t k) const;
  bool on_boundary(std::size_t k) const;
  std::vector<std::size_t> interior_nodes() const;
  std::vector<std::size_t> boundary_nodes() const;

  /// Trapezoid weight of node k; sums to the measure of the domain.
  double volume(std::size_t k) const;
  double measure() const;

  bool operator==(const Mesh&) const = default;
};

struct DiscreteField {
  Mesh mesh;
  std::vector<double> values;

  DiscreteField() = default;
  explicit DiscreteField(const Mesh& m, double fill = 0.0) : mesh(m), values(m.size(), fill) {}

  static DiscreteField sample(const Mesh& m, const std::function<double(const Point&)>& f);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }

  /// Zero the boundary nodes.
  void clamp_boundary();
  bool vanishes_on_boundary() const;
};

/// One quadrature term of the discrete energy: weight * a(x, g) with the discrete
/// gradient g = sum_k (cx[k], cy[k]) * u[nodes[k]].
struct GradientTerm {
  double weight = 0.0;
  Point x;
  int count = 0;
  std::array<std::size_t, 3> nodes{};
  std::array<double, 3> cx{};
  std::array<double, 3> cy{};

  Vec2 gradient(const std::vector<double>& u) const {
    Vec2 g{0.0, 0.0};
    for (int k = 0; k < count; ++k) {
      g[0] += cx[k] * u[nodes[k]];
      g[1] += cy[k] * u[nodes[k]];
    }
    return g;
  }
};

/// 1D: one term per cell with the forward difference at the cell midpoint.
/// 2D: each cell split into four corner quarters, each using the two edge
/// differences meeting at that corner and evaluated at the cell center.
std::vector<GradientTerm> gradient_terms(const Mesh& m);

double energy(const Mesh& m, const FluxModel& flux, const DiscreteField& u);

/// Energy gradient divided by node volumes; zero on boundary nodes.
DiscreteField apply_operator(const Mesh& m, const FluxModel& flux, const DiscreteField& u);

/// Hessian of the energy in the interior numbering (position in interior_nodes()).
/// Entries may repeat and are meant to be summed.
struct HessianEntry {
  std::size_t row;
  std::size_t col;
  double value;
};
std::vector<HessianEntry> energy_hessian(const Mesh& m, const FluxModel& flux, const DiscreteField& u, double floor);

/// Volume-weighted l^q norm, q in [1, inf]; q = inf is the max magnitude.
double lq_norm(const DiscreteField& f, double q);
/// Volume-weighted inner product.
double inner(const DiscreteField& a, const DiscreteField& b);
/// Sum of vol_i * max(f_i, 0).
double positive_mass(const DiscreteField& f);
/// Anisotropic total variation: |f_i - f_j| over axis neighbours times the transverse node weight.
double total_variation(const DiscreteField& f);
/// sum over gradient terms of weight * |g|^p.
double gradient_power_sum(const Mesh& m, const DiscreteField& u, double p);

DiscreteField operator-(const DiscreteField& a, const DiscreteField& b);
DiscreteField operator+(const DiscreteField& a, const DiscreteField& b);
DiscreteField operator*(double s, const DiscreteField& a);

/// "%.17g".
std::string format_real(double v);

/// Header x[,y],value then one node per line.
void write_csv(std::ostream& os, const DiscreteField& f);

void check_same_mesh(const Mesh& a, const Mesh& b, const char* what);

}  // namespace dnp
