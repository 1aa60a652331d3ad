#include "mmreg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mmreg/warp.hpp"

namespace mmreg {

namespace {

// Template geometry as fractions of the smallest axis extent (in pixels).
constexpr double kOuterRadius = 0.32;
constexpr double kInnerRadius = 0.21;
constexpr double kCoreRadius = 0.12;   // label-2 disc in two_label
constexpr double kEdgeWidth = 1.2;     // intensity ramp width in pixels

double smoothstep01(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

/// Random band-limited field: a sine series over the low multi-indices with
/// N(0,1) coefficients, rescaled to unit max-abs. Smooth by construction.
ScalarField bandlimited_noise(const Grid& grid, double cutoff, std::mt19937_64& rng) {
  const int nd = grid.ndim();
  int kept[3] = {1, 1, 1};
  for (int a = 0; a < nd; ++a)
    kept[a] = std::max(1, static_cast<int>(std::floor(cutoff * grid.dim(a))));

  const int nmodes = kept[0] * kept[1] * (nd == 3 ? kept[2] : 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> coef(nmodes);
  for (double& c : coef) c = gauss(rng);

  // Per-axis sine tables: sin(pi k (i+1) / (n+1)), nonzero on the grid.
  std::vector<std::vector<double>> table(nd);
  for (int a = 0; a < nd; ++a) {
    const int n = grid.dim(a);
    table[a].resize(static_cast<std::size_t>(kept[a]) * n);
    for (int k = 0; k < kept[a]; ++k)
      for (int i = 0; i < n; ++i)
        table[a][static_cast<std::size_t>(k) * n + i] =
            std::sin(std::numbers::pi * (k + 1) * (i + 1) / (n + 1));
  }

  ScalarField f(grid);
  const int n2 = nd == 3 ? grid.dim(2) : 1;
  const int k2max = nd == 3 ? kept[2] : 1;
  std::size_t idx = 0;
  for (int i = 0; i < grid.dim(0); ++i)
    for (int j = 0; j < grid.dim(1); ++j)
      for (int k = 0; k < n2; ++k, ++idx) {
        double acc = 0.0;
        int mode = 0;
        for (int k0 = 0; k0 < kept[0]; ++k0)
          for (int k1 = 0; k1 < kept[1]; ++k1)
            for (int kk = 0; kk < k2max; ++kk, ++mode) {
              double term = coef[mode] * table[0][k0 * grid.dim(0) + i] *
                            table[1][static_cast<std::size_t>(k1) * grid.dim(1) + j];
              if (nd == 3) term *= table[2][static_cast<std::size_t>(kk) * n2 + k];
              acc += term;
            }
        f[idx] = acc;
      }

  double peak = 0.0;
  for (double v : f.values) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : f.values) v /= peak;
  return f;
}

double radius_from_center(const Grid& g, const int* c) {
  double r2 = 0.0;
  for (int a = 0; a < g.ndim(); ++a) {
    const double d = c[a] - 0.5 * (g.dim(a) - 1);
    r2 += d * d;
  }
  return std::sqrt(r2);
}

}  // namespace

DeformationParams sample_params(const SynthConfig& cfg) {
  if (!(cfg.cutoff > 0.0 && cfg.cutoff <= 0.5))
    throw std::invalid_argument("sample_params: cutoff outside (0, 0.5]");
  if (!(cfg.mu_amplitude >= 0.0 && cfg.gamma_amplitude >= 0.0))
    throw std::invalid_argument("sample_params: negative amplitude");
  std::mt19937_64 rng(cfg.seed);
  DeformationParams p =
      DeformationParams::zeros(cfg.grid, cfg.tau_lb, cfg.tau_ub, cfg.gamma_scale);
  p.raw_mu = bandlimited_noise(cfg.grid, cfg.cutoff, rng);
  for (double& v : p.raw_mu.values) v *= cfg.mu_amplitude;
  for (auto& comp : p.raw_gamma) {
    comp = bandlimited_noise(cfg.grid, cfg.cutoff, rng);
    for (double& v : comp.values) v *= cfg.gamma_amplitude;
  }
  return p;
}

void render_template(const SynthConfig& cfg, Image& img, Mask& mask) {
  const Grid& g = cfg.grid;
  int min_dim = g.dim(0);
  for (int a = 1; a < g.ndim(); ++a) min_dim = std::min(min_dim, g.dim(a));
  const double extent = min_dim - 1;
  const double r_out = kOuterRadius * extent;
  const double r_in = kInnerRadius * extent;
  const double r_core = kCoreRadius * extent;

  img = Image(g);
  const int nlabels = cfg.shape == TemplateShape::two_label ? 3 : 2;
  mask = Mask(g, nlabels);

  const int n2 = g.ndim() == 3 ? g.dim(2) : 1;
  std::size_t idx = 0;
  int c[3] = {0, 0, 0};
  for (int i = 0; i < g.dim(0); ++i)
    for (int j = 0; j < g.dim(1); ++j)
      for (int k = 0; k < n2; ++k, ++idx) {
        c[0] = i;
        c[1] = j;
        c[2] = k;
        const double r = radius_from_center(g, c);
        switch (cfg.shape) {
          case TemplateShape::disc: {
            img[idx] = smoothstep01((r_out - r) / kEdgeWidth);
            mask.labels[idx] = r <= r_out ? 1 : 0;
            break;
          }
          case TemplateShape::annulus: {
            img[idx] = smoothstep01((r_out - r) / kEdgeWidth) *
                       smoothstep01((r - r_in) / kEdgeWidth);
            mask.labels[idx] = (r >= r_in && r <= r_out) ? 1 : 0;
            break;
          }
          case TemplateShape::two_label: {
            const double ring = smoothstep01((r_out - r) / kEdgeWidth) *
                                smoothstep01((r - r_in) / kEdgeWidth);
            const double core = smoothstep01((r_core - r) / kEdgeWidth);
            img[idx] = ring + 0.6 * core;
            if (r <= r_core)
              mask.labels[idx] = 2;
            else if (r >= r_in && r <= r_out)
              mask.labels[idx] = 1;
            else
              mask.labels[idx] = 0;
            break;
          }
        }
      }
}

SynthPair make_pair(const SynthConfig& cfg) {
  if (cfg.gt_steps < 1) throw std::invalid_argument("make_pair: gt_steps < 1");
  const DeformationParams params = sample_params(cfg);
  SynthPair out;
  render_template(cfg, out.fixed, out.fixed_mask);
  DeformationPair gt = build_deformation(params, {cfg.gt_steps, Direction::forward});
  out.phi_gt_f = std::move(gt.phi_f);
  out.phi_gt_b = std::move(gt.phi_b);
  out.moving = warp_image(out.fixed, out.phi_gt_b);
  out.moving_mask = warp_mask(out.fixed_mask, out.phi_gt_b);
  return out;
}

}  // namespace mmreg
