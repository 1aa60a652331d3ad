#include "mmreg/registration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mmreg/diffops.hpp"
#include "mmreg/warp.hpp"

namespace mmreg {

namespace {

void check_inputs(const Image& fixed, const Image& moving,
                  const RegistrationConfig& cfg) {
  if (fixed.grid != moving.grid)
    throw std::invalid_argument("registration: fixed and moving grids differ");
  if (!fixed.all_finite() || !moving.all_finite())
    throw std::invalid_argument("registration: images contain non-finite values");
  if (cfg.iterations < 0 || cfg.euler_steps < 1 || !(cfg.learning_rate > 0.0) ||
      !(cfg.loss_weight > 0.0))
    throw std::invalid_argument("registration: invalid configuration");
}

struct EvalResult {
  double value;
  ParamCotangents grads;
};

EvalResult eval_with_gradient(const DeformationParams& params, const Image& fixed,
                              const Image& moving, const RegistrationConfig& cfg,
                              const PoissonSolver& solver) {
  const Dissimilarity kind = resolve_dissimilarity(cfg.dissimilarity, fixed.grid);
  DeformationTape tape = build_deformation_tape(params, cfg.euler_steps, solver);
  const Image warped_m = warp_image(moving, tape.phi_f);
  const Image warped_f = warp_image(fixed, tape.phi_b);
  const double w = cfg.loss_weight;

  EvalResult r;
  r.value = w * dissimilarity_loss(kind, fixed, warped_m) +
            w * dissimilarity_loss(kind, moving, warped_f);

  ScalarField bar_f = dissimilarity_grad_b(kind, fixed, warped_m);
  ScalarField bar_b = dissimilarity_grad_b(kind, moving, warped_f);
  for (std::size_t i = 0; i < bar_f.size(); ++i) {
    bar_f[i] *= w;
    bar_b[i] *= w;
  }
  const std::vector<double> phi_f_bar = warp_vjp_phi(moving, tape.phi_f, bar_f);
  const std::vector<double> phi_b_bar = warp_vjp_phi(fixed, tape.phi_b, bar_b);
  r.grads = build_deformation_vjp(params, tape, solver, phi_f_bar, phi_b_bar);
  return r;
}

}  // namespace

double symmetric_objective(const DeformationParams& params, const Image& fixed,
                           const Image& moving, const RegistrationConfig& cfg) {
  check_inputs(fixed, moving, cfg);
  const Dissimilarity kind = resolve_dissimilarity(cfg.dissimilarity, fixed.grid);
  const DeformationPair pair =
      build_deformation(params, {cfg.euler_steps, Direction::forward});
  const Image warped_m = warp_image(moving, pair.phi_f);
  const Image warped_f = warp_image(fixed, pair.phi_b);
  return cfg.loss_weight * dissimilarity_loss(kind, fixed, warped_m) +
         cfg.loss_weight * dissimilarity_loss(kind, moving, warped_f);
}

ObjectiveGradient objective_gradient(const DeformationParams& params,
                                     const Image& fixed, const Image& moving,
                                     const RegistrationConfig& cfg) {
  check_inputs(fixed, moving, cfg);
  PoissonSolver solver(fixed.grid);
  EvalResult r = eval_with_gradient(params, fixed, moving, cfg, solver);
  ObjectiveGradient out;
  out.value = r.value;
  out.raw_mu_bar = std::move(r.grads.raw_mu_bar);
  out.raw_gamma_bar = std::move(r.grads.raw_gamma_bar);
  return out;
}

DetJStats detj_stats_of(const DeformationField& phi) {
  const ScalarField det = jacobian_determinant(phi);
  DetJStats s;
  s.min = det[0];
  s.max = det[0];
  std::size_t bad = 0;
  for (std::size_t i = 0; i < det.size(); ++i) {
    s.min = std::min(s.min, det[i]);
    s.max = std::max(s.max, det[i]);
    if (det[i] <= 0.0) ++bad;
  }
  s.pct_nonpositive = 100.0 * static_cast<double>(bad) / det.size();
  return s;
}

RegistrationResult register_pair(const Image& fixed, const Image& moving,
                                 const RegistrationConfig& cfg) {
  check_inputs(fixed, moving, cfg);
  const auto t0 = std::chrono::steady_clock::now();

  const Grid& grid = fixed.grid;
  PoissonSolver solver(grid);
  DeformationParams params =
      DeformationParams::zeros(grid, cfg.tau_lb, cfg.tau_ub, cfg.gamma_scale);
  DeformationParams best = params;

  const std::size_t n = grid.size();
  const std::size_t nfields = 1 + params.raw_gamma.size();
  std::vector<std::vector<double>> m1(nfields, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> m2(nfields, std::vector<double>(n, 0.0));
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  RegistrationResult result;
  result.loss_trace.reserve(cfg.iterations);
  double best_loss = std::numeric_limits<double>::infinity();
  int best_iter = 0;

  auto field_of = [&](DeformationParams& p, std::size_t f) -> ScalarField& {
    return f == 0 ? p.raw_mu : p.raw_gamma[f - 1];
  };
  auto grad_of = [&](ParamCotangents& g, std::size_t f) -> ScalarField& {
    return f == 0 ? g.raw_mu_bar : g.raw_gamma_bar[f - 1];
  };

  for (int it = 0; it < cfg.iterations; ++it) {
    EvalResult ev = eval_with_gradient(params, fixed, moving, cfg, solver);
    if (!std::isfinite(ev.value))
      throw std::runtime_error("register_pair: non-finite loss at iteration " +
                               std::to_string(it));
    result.loss_trace.push_back(ev.value);
    if (ev.value < best_loss) {
      best_loss = ev.value;
      best_iter = it;
      best = params;
    }

    if (cfg.plain_gd) {
      for (std::size_t f = 0; f < nfields; ++f) {
        ScalarField& x = field_of(params, f);
        const ScalarField& g = grad_of(ev.grads, f);
        for (std::size_t i = 0; i < n; ++i) x[i] -= cfg.learning_rate * g[i];
      }
    } else {
      const double bc1 = 1.0 - std::pow(beta1, it + 1);
      const double bc2 = 1.0 - std::pow(beta2, it + 1);
      for (std::size_t f = 0; f < nfields; ++f) {
        ScalarField& x = field_of(params, f);
        const ScalarField& g = grad_of(ev.grads, f);
        for (std::size_t i = 0; i < n; ++i) {
          m1[f][i] = beta1 * m1[f][i] + (1.0 - beta1) * g[i];
          m2[f][i] = beta2 * m2[f][i] + (1.0 - beta2) * g[i] * g[i];
          const double mhat = m1[f][i] / bc1;
          const double vhat = m2[f][i] / bc2;
          x[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + eps);
        }
      }
    }
  }

  if (cfg.iterations == 0) best_loss = symmetric_objective(best, fixed, moving, cfg);

  DeformationTape tape = build_deformation_tape(best, cfg.euler_steps, solver);
  result.phi_f = std::move(tape.phi_f);
  result.phi_b = std::move(tape.phi_b);
  result.mu = std::move(tape.monitor.mu);
  result.gamma = std::move(tape.gamma);
  result.detj = detj_stats_of(result.phi_f);
  result.best_iteration = best_iter;
  result.best_loss = best_loss;
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace mmreg
