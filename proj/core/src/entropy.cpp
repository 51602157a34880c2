#include <algorithm>
#include <cmath>

#include "dnp/errors.hpp"
#include "dnp/parabolic_stepper.hpp"

namespace dnp {

namespace {

double cubic_profile(double r) {
  if (r >= 1.0) return 0.0;
  r = std::max(r, 0.0);
  return 1.0 - 3.0 * r * r + 2.0 * r * r * r;
}

struct Box1 {
  double center;
  double radius;
};

}  // namespace

std::vector<TestFunction> make_test_family(const Mesh& m, double T, int count) {
  if (count < 0) throw ParameterError("test family size must be nonnegative");
  const double lx = m.x1 - m.x0;
  // Interior dyadic boxes first, then boundary-anchored ones, then finer interior boxes.
  std::vector<std::pair<Box1, bool>> xs = {
      {{m.x0 + 0.5 * lx, 0.5 * lx}, false},   {{m.x0, 0.5 * lx}, true},
      {{m.x0 + 0.375 * lx, 0.125 * lx}, false}, {{m.x1, 0.5 * lx}, true},
      {{m.x0 + 0.625 * lx, 0.125 * lx}, false}, {{m.x0 + 0.25 * lx, 0.25 * lx}, false},
      {{m.x0 + 0.75 * lx, 0.25 * lx}, false},   {{m.x0 + 0.125 * lx, 0.125 * lx}, false},
      {{m.x0 + 0.875 * lx, 0.125 * lx}, false},
  };
  std::vector<TestFunction> out;
  const int dim = m.dim;
  const double ycen = 0.5 * (m.y0 + m.y1);
  const double yrad = 0.5 * (m.y1 - m.y0);
  for (int k = 0; k < count; ++k) {
    const auto& [bx, touches] = xs[k % xs.size()];
    const int level = static_cast<int>(k / xs.size());
    const double tsupport = (k % 2 == 0 ? T : 0.5 * T) / (1 << level);
    TestFunction tf;
    tf.touches_boundary = touches;
    tf.label = "bump(" + format_real(bx.center) + "," + format_real(bx.radius) + ";T=" + format_real(tsupport) + ")";
    const Box1 b = bx;
    tf.value = [b, tsupport, dim, ycen, yrad](const Point& x, double t) {
      double v = cubic_profile(std::abs(x.x - b.center) / b.radius) * cubic_profile(t / tsupport);
      if (dim == 2) v *= cubic_profile(std::abs(x.y - ycen) / yrad);
      return v;
    };
    out.push_back(std::move(tf));
  }
  return out;
}

double default_entropy_slack(const TrajectoryReport& rep) {
  double scale = 1.0;
  for (const auto& f : rep.xi) scale = std::max(scale, lq_norm(f, kInf));
  for (const auto& f : rep.u) scale = std::max(scale, lq_norm(f, kInf));
  for (const auto& f : rep.f_avg) scale = std::max(scale, lq_norm(f, kInf));
  const double h2 = rep.mesh.dim == 2 ? std::max(rep.mesh.hx * rep.mesh.hx, rep.mesh.hy * rep.mesh.hy)
                                      : rep.mesh.hx * rep.mesh.hx;
  return 10.0 * (h2 + rep.tau()) * scale;
}

std::vector<LedgerEntry> entropy_check(const ProblemSetup& setup, const TrajectoryReport& rep,
                                       const std::vector<double>& s_values, const std::vector<TestFunction>& family,
                                       double slack) {
  if (!setup.flux.x_independent) throw PreconditionError("entropy check requires an x-independent flux");
  check_same_mesh(setup.mesh, rep.mesh, "entropy_check");
  const Mesh& m = rep.mesh;
  const double tau = rep.tau();
  const int N = rep.N;
  const auto terms = gradient_terms(m);

  // v = u + xi at every time level.
  std::vector<std::vector<double>> v(N + 1, std::vector<double>(m.size()));
  for (int n = 0; n <= N; ++n)
    for (std::size_t k = 0; k < m.size(); ++k) v[n][k] = rep.u[n][k] + rep.xi[n][k];

  // Flux per term and time level n = 1..N.
  std::vector<std::vector<Vec2>> flux(N + 1);
  for (int n = 1; n <= N; ++n) {
    flux[n].reserve(terms.size());
    for (const auto& t : terms) flux[n].push_back(setup.flux.flux(t.x, t.gradient(rep.u[n].values)));
  }

  std::vector<LedgerEntry> out;
  for (std::size_t z = 0; z < family.size(); ++z) {
    const auto& tf = family[z];
    std::vector<std::vector<double>> zeta(N + 1, std::vector<double>(m.size()));
    for (int n = 0; n <= N; ++n)
      for (std::size_t k = 0; k < m.size(); ++k) zeta[n][k] = tf.value(m.node(k), n * tau);

    for (double s : s_values) {
      if (tf.touches_boundary && s < 0.0) continue;
      for (int side = 0; side < 2; ++side) {
        // side 0: H(v - s) with (xi - g(s))_+; side 1: mirrored, H(-s - v) with (g(-s) - xi)_+.
        const double sign = side == 0 ? 1.0 : -1.0;
        const double gs = setup.beta.bg_pair(sign * s).g;
        auto H = [&](double vv) { return sign * vv - s > 0.0 ? 1.0 : 0.0; };
        auto pos = [&](double x) { return std::max(sign * (x - gs), 0.0); };

        double flux_term = 0.0, time_term = 0.0, source_term = 0.0, initial_term = 0.0;
        for (int n = 0; n < N; ++n) {
          const auto& vn1 = v[n + 1];
          for (std::size_t ti = 0; ti < terms.size(); ++ti) {
            const auto& t = terms[ti];
            // Edge averages of H along each axis, paired with the matching component of the test gradient.
            double hx = 0.0, hy = 0.0, wx = 0.0, wy = 0.0;
            Vec2 dz{0.0, 0.0};
            for (int a = 0; a < t.count; ++a) {
              const double hv = H(vn1[t.nodes[a]]);
              if (t.cx[a] != 0.0) { hx += hv; wx += 1.0; }
              if (t.cy[a] != 0.0) { hy += hv; wy += 1.0; }
              dz[0] += t.cx[a] * zeta[n][t.nodes[a]];
              dz[1] += t.cy[a] * zeta[n][t.nodes[a]];
            }
            const Vec2& a = flux[n + 1][ti];
            flux_term += t.weight * ((wx > 0 ? hx / wx : 0.0) * a[0] * dz[0] + (wy > 0 ? hy / wy : 0.0) * a[1] * dz[1]);
          }
          for (std::size_t k = 0; k < m.size(); ++k) {
            const double vol = m.volume(k);
            time_term += vol * pos(rep.xi[n + 1][k]) * (zeta[n + 1][k] - zeta[n][k]);
            if (!m.on_boundary(k)) source_term += vol * H(vn1[k]) * rep.f_avg[n][k] * zeta[n][k];
          }
        }
        for (std::size_t k = 0; k < m.size(); ++k) initial_term += m.volume(k) * pos(rep.xi[0][k]) * zeta[0][k];

        const double value = sign * tau * flux_term - time_term - sign * tau * source_term - initial_term;
        const std::string name = std::string(side == 0 ? "entropy_upper" : "entropy_lower") + "[s=" + format_real(s) +
                                 ",zeta=" + std::to_string(z) + "]";
        out.push_back(bound_entry(name, -1, value, 0.0, 0.0, slack));
      }
    }
  }
  return out;
}

}  // namespace dnp
