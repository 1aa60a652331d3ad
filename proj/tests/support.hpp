#pragma once

// Shared fixtures for the test suites: random fields, a manufactured
// div-curl instance with known exact velocity, and transform-composition
// error measurement.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mmreg/diffops.hpp"
#include "mmreg/field.hpp"
#include "mmreg/interp.hpp"
#include "mmreg/moving_mesh.hpp"

namespace testsupport {

using namespace mmreg;

inline ScalarField random_field(const Grid& g, std::mt19937_64& rng, double lo = -1.0,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  return f;
}

/// White-noise raw parameters with the standard bounds.
inline DeformationParams random_params(const Grid& g, std::mt19937_64& rng,
                                       double amp) {
  DeformationParams p = DeformationParams::zeros(g);
  p.raw_mu = random_field(g, rng, -amp, amp);
  for (auto& comp : p.raw_gamma) comp = random_field(g, rng, -amp, amp);
  return p;
}

/// Smooth deterministic 2D raw fields for integration studies; low frequency
/// so the spatial discretization floor stays well under step-count error.
inline DeformationParams smooth_params_2d(const Grid& g, double mu_amp,
                                          double gamma_amp) {
  const double pi = std::numbers::pi;
  DeformationParams p = DeformationParams::zeros(g);
  for (int i = 0; i < g.dim(0); ++i)
    for (int j = 0; j < g.dim(1); ++j) {
      const double u = i / (g.dim(0) - 1.0), v = j / (g.dim(1) - 1.0);
      p.raw_mu.at(i, j) = mu_amp * std::sin(2.0 * pi * u) * std::sin(pi * v) +
                          0.4 * mu_amp * std::cos(pi * u) * std::sin(2.0 * pi * v);
      p.raw_gamma[0].at(i, j) =
          gamma_amp * std::sin(pi * u) * std::sin(pi * v) * std::cos(pi * (u - v));
    }
  return p;
}

/// Monitor function mu = 1 + Laplacian(P) with potential
/// P(u,v) = A sin^2(pi u) sin^2(pi v) in unit coordinates u = x/L. The exact
/// pixel-space velocity of the div-curl problem (gamma = 0) is
/// V_a = L dP/du_a, which vanishes identically on the boundary, and
/// div V = mu - 1 holds exactly in the continuum.
struct Manufactured2D {
  ScalarField mu;
  VectorField v_exact;
};

inline Manufactured2D manufactured_2d(int n, double amplitude) {
  const Grid g(n, n);
  const double pi = std::numbers::pi;
  const double L = n - 1.0;
  Manufactured2D out{ScalarField(g), VectorField(g)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = i / L, v = j / L;
      const double su = std::sin(pi * u), sv = std::sin(pi * v);
      const double lap = 2.0 * pi * pi * amplitude *
                         (std::cos(2.0 * pi * u) * sv * sv +
                          su * su * std::cos(2.0 * pi * v));
      out.mu.at(i, j) = 1.0 + lap;
      out.v_exact[0].at(i, j) =
          L * amplitude * pi * std::sin(2.0 * pi * u) * sv * sv;
      out.v_exact[1].at(i, j) =
          L * amplitude * pi * su * su * std::sin(2.0 * pi * v);
    }
  return out;
}

/// Mean over grid points of || phi_b(phi_f(xi)) - xi || in pixels, with
/// phi_b evaluated off-grid by linear interpolation of its components.
inline double mean_composition_error_px(const DeformationField& phi_f,
                                        const DeformationField& phi_b) {
  const Grid& g = phi_f.grid;
  const int nd = g.ndim();
  const std::size_t n = g.size();
  std::vector<ScalarField> comp_b;
  for (int a = 0; a < nd; ++a)
    comp_b.emplace_back(g, std::vector<double>(phi_b.targets.begin() + a * n,
                                               phi_b.targets.begin() + (a + 1) * n));
  const DeformationField id = DeformationField::identity(g);
  double acc = 0.0;
  double p[3];
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < nd; ++a) p[a] = phi_f.targets[a * n + i];
    double e2 = 0.0;
    for (int a = 0; a < nd; ++a) {
      const double back = interp_linear(comp_b[a], {p, static_cast<std::size_t>(nd)});
      const double d = back - id.targets[a * n + i];
      e2 += d * d;
    }
    acc += std::sqrt(e2);
  }
  return acc / static_cast<double>(n);
}

inline double max_interior_divergence_residual(const VectorField& v,
                                               const ScalarField& mu) {
  const ScalarField div = divergence(v);
  const Grid& g = v.grid;
  double worst = 0.0;
  const int n2 = g.ndim() == 3 ? g.dim(2) : 1;
  for (int i = 0; i < g.dim(0); ++i)
    for (int j = 0; j < g.dim(1); ++j)
      for (int k = 0; k < n2; ++k) {
        const bool interior =
            g.ndim() == 2 ? !g.on_boundary(i, j) : !g.on_boundary(i, j, k);
        if (!interior) continue;
        const std::size_t idx = g.ndim() == 2 ? g.index(i, j) : g.index(i, j, k);
        worst = std::max(worst,
                         std::abs(div.values[idx] - (mu.values[idx] - 1.0)));
      }
  return worst;
}

}  // namespace testsupport
