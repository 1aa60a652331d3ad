#include "mmreg/moving_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmreg/diffops.hpp"
#include "mmreg/interp.hpp"

namespace mmreg {

DeformationParams DeformationParams::zeros(const Grid& grid, double tau_lb,
                                           double tau_ub, double gamma_scale) {
  DeformationParams p;
  p.raw_mu = ScalarField(grid);
  const int ncomp = grid.ndim() == 2 ? 1 : 3;
  for (int c = 0; c < ncomp; ++c) p.raw_gamma.emplace_back(grid);
  p.tau_lb = tau_lb;
  p.tau_ub = tau_ub;
  p.gamma_scale = gamma_scale;
  p.validate();
  return p;
}

void DeformationParams::validate() const {
  if (!(tau_lb > 0.0 && tau_lb < 1.0 && tau_ub > 1.0 && tau_ub <= gamma_scale &&
        std::isfinite(gamma_scale)))
    throw std::invalid_argument(
        "DeformationParams: bounds must satisfy 0 < tau_lb < 1 < tau_ub <= lambda");
  const int want = raw_mu.grid.ndim() == 2 ? 1 : 3;
  if (static_cast<int>(raw_gamma.size()) != want)
    throw std::invalid_argument("DeformationParams: wrong curl component count");
  for (const auto& g : raw_gamma)
    if (g.grid != raw_mu.grid)
      throw std::invalid_argument("DeformationParams: fields on different grids");
}

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

MonitorProjection project_monitor_tape(const ScalarField& raw_mu, double tau_lb,
                                       double tau_ub) {
  if (!(tau_lb > 0.0 && tau_lb < 1.0 && tau_ub > 1.0))
    throw std::invalid_argument("project_monitor: invalid bounds");
  const std::size_t n = raw_mu.size();
  MonitorProjection out;
  out.sigma = ScalarField(raw_mu.grid);
  out.mu = ScalarField(raw_mu.grid);
  const double span = tau_ub - tau_lb;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = sigmoid(raw_mu[i]);
    out.sigma[i] = s;
    out.mu[i] = tau_lb + span * s;  // mu_pre for now
    sum += out.mu[i];
  }
  out.sum_pre = sum;
  const double scale = static_cast<double>(n) / sum;
  for (std::size_t i = 0; i < n; ++i) out.mu[i] *= scale;
  return out;
}

ScalarField project_monitor(const ScalarField& raw_mu, double tau_lb, double tau_ub) {
  return project_monitor_tape(raw_mu, tau_lb, tau_ub).mu;
}

ScalarField project_monitor_vjp(const MonitorProjection& tape, double tau_lb,
                                double tau_ub, const ScalarField& mu_bar) {
  const std::size_t n = mu_bar.size();
  const double span = tau_ub - tau_lb;
  const double omega = static_cast<double>(n);
  const double s = tape.sum_pre;
  // mu_i = omega * pre_i / s with s = sum(pre); then through the sigmoid.
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pre = tau_lb + span * tape.sigma[i];
    dot += mu_bar[i] * pre;
  }
  ScalarField raw_bar(mu_bar.grid);
  const double a = omega / s;
  const double b = omega / (s * s) * dot;
  for (std::size_t i = 0; i < n; ++i) {
    const double pre_bar = a * mu_bar[i] - b;
    const double sig = tape.sigma[i];
    raw_bar[i] = pre_bar * span * sig * (1.0 - sig);
  }
  return raw_bar;
}

ScalarField project_curl(const ScalarField& raw, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("project_curl: lambda must be > 0");
  ScalarField out(raw.grid);
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = lambda * std::tanh(raw[i]);
  return out;
}

ScalarField project_curl_vjp(const ScalarField& raw, double lambda,
                             const ScalarField& gamma_bar) {
  ScalarField out(raw.grid);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double th = std::tanh(raw[i]);
    out[i] = gamma_bar[i] * lambda * (1.0 - th * th);
  }
  return out;
}

std::array<ScalarField, 2> assemble_rhs_2d(const ScalarField& mu,
                                           const ScalarField& gamma) {
  if (mu.grid != gamma.grid)
    throw std::invalid_argument("assemble_rhs_2d: grid mismatch");
  if (mu.grid.ndim() != 2) throw std::invalid_argument("assemble_rhs_2d: not a 2D grid");
  const ScalarField mu_0 = axis_derivative(mu, 0);
  const ScalarField mu_1 = axis_derivative(mu, 1);
  const ScalarField ga_0 = axis_derivative(gamma, 0);
  const ScalarField ga_1 = axis_derivative(gamma, 1);
  ScalarField f0(mu.grid), f1(mu.grid);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    f0[i] = mu_0[i] - ga_1[i];
    f1[i] = mu_1[i] + ga_0[i];
  }
  return {std::move(f0), std::move(f1)};
}

std::array<ScalarField, 3> assemble_rhs_3d(const ScalarField& mu,
                                           const std::vector<ScalarField>& gamma) {
  if (mu.grid.ndim() != 3) throw std::invalid_argument("assemble_rhs_3d: not a 3D grid");
  if (gamma.size() != 3)
    throw std::invalid_argument("assemble_rhs_3d: need 3 curl components");
  for (const auto& g : gamma)
    if (g.grid != mu.grid) throw std::invalid_argument("assemble_rhs_3d: grid mismatch");
  // Taking the divergence of the div-curl block rows turns V into Laplacians
  // (div V supplies the diagonal, curl terms cancel pairwise under mixed
  // partials), leaving one Poisson equation per component.
  ScalarField f0 = axis_derivative(mu, 0);
  ScalarField f1 = axis_derivative(mu, 1);
  ScalarField f2 = axis_derivative(mu, 2);
  const ScalarField g0_1 = axis_derivative(gamma[0], 1);
  const ScalarField g0_2 = axis_derivative(gamma[0], 2);
  const ScalarField g1_0 = axis_derivative(gamma[1], 0);
  const ScalarField g1_2 = axis_derivative(gamma[1], 2);
  const ScalarField g2_0 = axis_derivative(gamma[2], 0);
  const ScalarField g2_1 = axis_derivative(gamma[2], 1);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    f0[i] += g1_2[i] - g2_1[i];
    f1[i] += g2_0[i] - g0_2[i];
    f2[i] += g0_1[i] - g1_0[i];
  }
  return {std::move(f0), std::move(f1), std::move(f2)};
}

RhsCotangents assemble_rhs_vjp(const Grid& grid,
                               const std::vector<ScalarField>& rhs_bar) {
  const int nd = grid.ndim();
  if (static_cast<int>(rhs_bar.size()) != nd)
    throw std::invalid_argument("assemble_rhs_vjp: wrong cotangent count");
  RhsCotangents out;
  if (nd == 2) {
    const ScalarField a0 = axis_derivative_adjoint(rhs_bar[0], 0);
    const ScalarField a1 = axis_derivative_adjoint(rhs_bar[1], 1);
    const ScalarField b0 = axis_derivative_adjoint(rhs_bar[0], 1);
    const ScalarField b1 = axis_derivative_adjoint(rhs_bar[1], 0);
    out.mu_bar = ScalarField(grid);
    ScalarField gbar(grid);
    for (std::size_t i = 0; i < out.mu_bar.size(); ++i) {
      out.mu_bar[i] = a0[i] + a1[i];
      gbar[i] = b1[i] - b0[i];
    }
    out.gamma_bar.push_back(std::move(gbar));
    return out;
  }
  const ScalarField m0 = axis_derivative_adjoint(rhs_bar[0], 0);
  const ScalarField m1 = axis_derivative_adjoint(rhs_bar[1], 1);
  const ScalarField m2 = axis_derivative_adjoint(rhs_bar[2], 2);
  out.mu_bar = ScalarField(grid);
  for (std::size_t i = 0; i < out.mu_bar.size(); ++i)
    out.mu_bar[i] = m0[i] + m1[i] + m2[i];

  const ScalarField t01 = axis_derivative_adjoint(rhs_bar[0], 1);  // from g2 in f0
  const ScalarField t02 = axis_derivative_adjoint(rhs_bar[0], 2);  // from g1 in f0
  const ScalarField t10 = axis_derivative_adjoint(rhs_bar[1], 0);  // from g2 in f1
  const ScalarField t12 = axis_derivative_adjoint(rhs_bar[1], 2);  // from g0 in f1
  const ScalarField t20 = axis_derivative_adjoint(rhs_bar[2], 0);  // from g1 in f2
  const ScalarField t21 = axis_derivative_adjoint(rhs_bar[2], 1);  // from g0 in f2
  ScalarField g0(grid), g1(grid), g2(grid);
  for (std::size_t i = 0; i < g0.size(); ++i) {
    g0[i] = -t12[i] + t21[i];
    g1[i] = t02[i] - t20[i];
    g2[i] = -t01[i] + t10[i];
  }
  out.gamma_bar.push_back(std::move(g0));
  out.gamma_bar.push_back(std::move(g1));
  out.gamma_bar.push_back(std::move(g2));
  return out;
}

std::vector<ScalarField> assemble_rhs(const ScalarField& mu,
                                      const std::vector<ScalarField>& gamma) {
  if (mu.grid.ndim() == 2) {
    auto r = assemble_rhs_2d(mu, gamma.at(0));
    return {std::move(r[0]), std::move(r[1])};
  }
  auto r = assemble_rhs_3d(mu, gamma);
  return {std::move(r[0]), std::move(r[1]), std::move(r[2])};
}

VectorField reconstruct_velocity(const std::vector<ScalarField>& rhs,
                                 const PoissonSolver& solver) {
  if (rhs.empty() || static_cast<int>(rhs.size()) != solver.grid().ndim())
    throw std::invalid_argument("reconstruct_velocity: wrong RHS component count");
  VectorField v(solver.grid());
  for (std::size_t a = 0; a < rhs.size(); ++a) v[static_cast<int>(a)] = solver.solve(rhs[a]);
  return v;
}

DeformationField integrate_transform(const VectorField& velocity,
                                     const ScalarField& mu,
                                     const IntegrationConfig& cfg, Trajectory* tape) {
  const Grid& g = mu.grid;
  if (velocity.grid != g)
    throw std::invalid_argument("integrate_transform: grid mismatch");
  if (cfg.steps < 1) throw std::invalid_argument("integrate_transform: steps < 1");
  if (*std::min_element(mu.values.begin(), mu.values.end()) <= 0.0)
    throw std::domain_error("integrate_transform: monitor function must be positive");

  const int nd = g.ndim();
  const std::size_t n = g.size();
  const double dt = 1.0 / cfg.steps;
  const double sign = cfg.direction == Direction::forward ? 1.0 : -1.0;

  std::vector<double> state = DeformationField::identity(g).targets;
  if (tape) {
    tape->states.clear();
    tape->states.reserve(cfg.steps + 1);
    tape->direction = cfg.direction;
    tape->steps = cfg.steps;
    tape->states.push_back(state);
  }

  std::vector<double> next(state.size());
  double p[3];
  for (int k = 0; k < cfg.steps; ++k) {
    const double t =
        cfg.direction == Direction::forward ? k * dt : 1.0 - k * dt;
    const double one_minus_t = 1.0 - t;
    for (std::size_t i = 0; i < n; ++i) {
      for (int a = 0; a < nd; ++a) p[a] = state[a * n + i];
      const LinearStencil st = linear_stencil(g, p);
      const double m = t + one_minus_t * st.value(mu.values);
      const double c = sign * dt / m;
      for (int a = 0; a < nd; ++a)
        next[a * n + i] = p[a] + c * st.value(velocity[a].values);
    }
    state.swap(next);
    if (tape) tape->states.push_back(state);
  }

  DeformationField phi(g);
  phi.targets = std::move(state);
  return phi;
}

FlowCotangents integrate_transform_vjp(const VectorField& velocity,
                                       const ScalarField& mu, const Trajectory& tape,
                                       const std::vector<double>& phi_bar) {
  const Grid& g = mu.grid;
  const int nd = g.ndim();
  const std::size_t n = g.size();
  if (phi_bar.size() != static_cast<std::size_t>(nd) * n)
    throw std::invalid_argument("integrate_transform_vjp: cotangent size mismatch");
  const double dt = 1.0 / tape.steps;
  const double sign = tape.direction == Direction::forward ? 1.0 : -1.0;

  FlowCotangents out;
  out.velocity_bar = VectorField(g);
  out.mu_bar = ScalarField(g);

  double p[3], abar[3], nbar[3], v[3];
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < nd; ++a) abar[a] = phi_bar[a * n + i];
    for (int k = tape.steps - 1; k >= 0; --k) {
      const double t =
          tape.direction == Direction::forward ? k * dt : 1.0 - k * dt;
      const double one_minus_t = 1.0 - t;
      const std::vector<double>& state = tape.states[k];
      for (int a = 0; a < nd; ++a) p[a] = state[a * n + i];
      const LinearStencil st = linear_stencil(g, p);
      const double mu_here = st.value(mu.values);
      const double m = t + one_minus_t * mu_here;
      const double inv_m = 1.0 / m;
      const double c = sign * dt * inv_m;
      for (int a = 0; a < nd; ++a) v[a] = st.value(velocity[a].values);

      double s_av = 0.0;
      for (int a = 0; a < nd; ++a) s_av += abar[a] * v[a];

      // x_{k+1}[a] = x[a] + c * v[a], with c and v both functions of x.
      for (int a = 0; a < nd; ++a) st.scatter(abar[a] * c, out.velocity_bar[a].values);
      const double m_bar = -s_av * sign * dt * inv_m * inv_m;
      st.scatter(m_bar * one_minus_t, out.mu_bar.values);

      for (int b = 0; b < nd; ++b) {
        double acc = abar[b];
        const double dmu_db = st.point_derivative(mu.values, b);
        acc += m_bar * one_minus_t * dmu_db;
        for (int a = 0; a < nd; ++a)
          acc += abar[a] * c * st.point_derivative(velocity[a].values, b);
        nbar[b] = acc;
      }
      for (int b = 0; b < nd; ++b) abar[b] = nbar[b];
    }
  }
  return out;
}

DeformationPair build_deformation(const DeformationParams& params,
                                  const IntegrationConfig& cfg) {
  params.validate();
  PoissonSolver solver(params.raw_mu.grid);
  DeformationTape tape = build_deformation_tape(params, cfg.steps, solver);
  return {std::move(tape.phi_f), std::move(tape.phi_b)};
}

DeformationTape build_deformation_tape(const DeformationParams& params, int steps,
                                       const PoissonSolver& solver) {
  params.validate();
  if (params.raw_mu.grid != solver.grid())
    throw std::invalid_argument("build_deformation_tape: solver grid mismatch");
  DeformationTape tape;
  tape.monitor = project_monitor_tape(params.raw_mu, params.tau_lb, params.tau_ub);
  for (const auto& rg : params.raw_gamma)
    tape.gamma.push_back(project_curl(rg, params.gamma_scale));
  const std::vector<ScalarField> rhs = assemble_rhs(tape.monitor.mu, tape.gamma);
  tape.velocity = reconstruct_velocity(rhs, solver);
  tape.phi_f = integrate_transform(tape.velocity, tape.monitor.mu,
                                   {steps, Direction::forward}, &tape.traj_f);
  tape.phi_b = integrate_transform(tape.velocity, tape.monitor.mu,
                                   {steps, Direction::backward}, &tape.traj_b);
  return tape;
}

ParamCotangents build_deformation_vjp(const DeformationParams& params,
                                      const DeformationTape& tape,
                                      const PoissonSolver& solver,
                                      const std::vector<double>& phi_f_bar,
                                      const std::vector<double>& phi_b_bar) {
  const Grid& g = params.raw_mu.grid;
  FlowCotangents cf =
      integrate_transform_vjp(tape.velocity, tape.monitor.mu, tape.traj_f, phi_f_bar);
  FlowCotangents cb =
      integrate_transform_vjp(tape.velocity, tape.monitor.mu, tape.traj_b, phi_b_bar);

  std::vector<ScalarField> rhs_bar;
  rhs_bar.reserve(g.ndim());
  for (int a = 0; a < g.ndim(); ++a) {
    ScalarField vbar = cf.velocity_bar[a];
    for (std::size_t i = 0; i < vbar.size(); ++i) vbar[i] += cb.velocity_bar[a][i];
    // The solve is self-adjoint, so it is its own vector-Jacobian product;
    // cotangents landing on fixed zero-boundary values are dropped by it.
    rhs_bar.push_back(solver.solve(vbar));
  }
  RhsCotangents rc = assemble_rhs_vjp(g, rhs_bar);

  ScalarField mu_bar = rc.mu_bar;
  for (std::size_t i = 0; i < mu_bar.size(); ++i)
    mu_bar[i] += cf.mu_bar[i] + cb.mu_bar[i];

  ParamCotangents out;
  out.raw_mu_bar =
      project_monitor_vjp(tape.monitor, params.tau_lb, params.tau_ub, mu_bar);
  for (std::size_t c = 0; c < params.raw_gamma.size(); ++c)
    out.raw_gamma_bar.push_back(
        project_curl_vjp(params.raw_gamma[c], params.gamma_scale, rc.gamma_bar[c]));
  return out;
}

}  // namespace mmreg
