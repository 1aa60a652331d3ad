#pragma once

#include <array>
#include <vector>

#include "mmreg/field.hpp"
#include "mmreg/poisson.hpp"

namespace mmreg {

/// Raw unconstrained parameter fields that map to (mu, gamma) after
/// constraint projection. These are the optimization variables.
struct DeformationParams {
  ScalarField raw_mu;
  std::vector<ScalarField> raw_gamma;  // 1 component in 2D, 3 in 3D
  double tau_lb = 0.2;
  double tau_ub = 8.0;
  double gamma_scale = 10.0;

  static DeformationParams zeros(const Grid& grid, double tau_lb = 0.2,
                                 double tau_ub = 8.0, double gamma_scale = 10.0);
  void validate() const;  // 0 < tau_lb < 1 < tau_ub <= gamma_scale
};

enum class Direction { forward, backward };

struct IntegrationConfig {
  int steps = 20;  // Euler steps over t in [0,1]
  Direction direction = Direction::forward;
};

/// Monitor projection with the intermediates the backward pass needs.
struct MonitorProjection {
  ScalarField mu;
  ScalarField sigma;  // sigmoid(raw_mu)
  double sum_pre = 0.0;
};

/// mu_pre = tau_lb + (tau_ub - tau_lb) sigmoid(raw_mu), then normalized so
/// sum(mu) = |Omega|. Result is strictly positive with mean exactly 1.
ScalarField project_monitor(const ScalarField& raw_mu, double tau_lb, double tau_ub);
MonitorProjection project_monitor_tape(const ScalarField& raw_mu, double tau_lb,
                                       double tau_ub);
ScalarField project_monitor_vjp(const MonitorProjection& tape, double tau_lb,
                                double tau_ub, const ScalarField& mu_bar);

/// gamma = lambda * tanh(raw); elementwise, range (-lambda, lambda).
ScalarField project_curl(const ScalarField& raw, double lambda);
ScalarField project_curl_vjp(const ScalarField& raw, double lambda,
                             const ScalarField& gamma_bar);

/// Poisson right-hand sides of the div-curl system. The constant in mu - 1
/// drops out under differentiation, so mu is differenced directly.
std::array<ScalarField, 2> assemble_rhs_2d(const ScalarField& mu,
                                           const ScalarField& gamma);
std::array<ScalarField, 3> assemble_rhs_3d(const ScalarField& mu,
                                           const std::vector<ScalarField>& gamma);
std::vector<ScalarField> assemble_rhs(const ScalarField& mu,
                                      const std::vector<ScalarField>& gamma);

struct RhsCotangents {
  ScalarField mu_bar;
  std::vector<ScalarField> gamma_bar;
};
RhsCotangents assemble_rhs_vjp(const Grid& grid,
                               const std::vector<ScalarField>& rhs_bar);

/// One Poisson solve per component; V = 0 on the boundary by construction.
VectorField reconstruct_velocity(const std::vector<ScalarField>& rhs,
                                 const PoissonSolver& solver);

/// Stored Euler trajectory for reverse-mode accumulation: states[k] holds
/// the axis-major positions after k steps.
struct Trajectory {
  std::vector<std::vector<double>> states;
  Direction direction = Direction::forward;
  int steps = 0;
};

/// Explicit Euler integration of d psi/dt = V(psi) / (t + (1-t) mu(psi)).
/// Forward runs t from 0 to 1; backward runs t from 1 to 0 with negated
/// increments and yields the approximate inverse map. Throws if mu is not
/// strictly positive.
DeformationField integrate_transform(const VectorField& velocity,
                                     const ScalarField& mu,
                                     const IntegrationConfig& cfg,
                                     Trajectory* tape = nullptr);

struct FlowCotangents {
  VectorField velocity_bar;
  ScalarField mu_bar;
};
FlowCotangents integrate_transform_vjp(const VectorField& velocity,
                                       const ScalarField& mu, const Trajectory& tape,
                                       const std::vector<double>& phi_bar);

struct DeformationPair {
  DeformationField phi_f;
  DeformationField phi_b;
};

/// Full pipeline: project (mu, gamma), assemble RHS, reconstruct V,
/// integrate both directions.
DeformationPair build_deformation(const DeformationParams& params,
                                  const IntegrationConfig& cfg);

/// Same pipeline with every intermediate kept for the backward pass. The
/// solver must live on params.raw_mu.grid.
struct DeformationTape {
  MonitorProjection monitor;
  std::vector<ScalarField> gamma;
  VectorField velocity;
  Trajectory traj_f;
  Trajectory traj_b;
  DeformationField phi_f;
  DeformationField phi_b;
};
DeformationTape build_deformation_tape(const DeformationParams& params, int steps,
                                       const PoissonSolver& solver);

struct ParamCotangents {
  ScalarField raw_mu_bar;
  std::vector<ScalarField> raw_gamma_bar;
};
ParamCotangents build_deformation_vjp(const DeformationParams& params,
                                      const DeformationTape& tape,
                                      const PoissonSolver& solver,
                                      const std::vector<double>& phi_f_bar,
                                      const std::vector<double>& phi_b_bar);

}  // namespace mmreg
