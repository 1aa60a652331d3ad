#pragma once

#include <cstdint>
#include <vector>

#include "mmreg/loss.hpp"
#include "mmreg/moving_mesh.hpp"

namespace mmreg {

struct RegistrationConfig {
  double tau_lb = 0.2;
  double tau_ub = 8.0;
  double gamma_scale = 10.0;  // lambda
  double loss_weight = 0.5;   // w, applied to both directions
  Dissimilarity dissimilarity = Dissimilarity::automatic;
  double learning_rate = 5e-4;
  int iterations = 300;
  int euler_steps = 20;
  std::uint64_t seed = 0;  // recorded in the result; the solve itself is deterministic
  bool plain_gd = false;   // disable adaptive moments, use plain gradient descent
};

struct DetJStats {
  double min = 0.0;
  double max = 0.0;
  double pct_nonpositive = 0.0;  // percentage of points with det <= 0
};

struct RegistrationResult {
  DeformationField phi_f;
  DeformationField phi_b;
  ScalarField mu;
  std::vector<ScalarField> gamma;
  std::vector<double> loss_trace;  // objective at each iterate before its update
  DetJStats detj;
  int best_iteration = 0;
  double best_loss = 0.0;
  double seconds = 0.0;
};

/// w L(I_F, I_M o phi_f) + w L(I_M, I_F o phi_b).
double symmetric_objective(const DeformationParams& params, const Image& fixed,
                           const Image& moving, const RegistrationConfig& cfg);

struct ObjectiveGradient {
  double value = 0.0;
  ScalarField raw_mu_bar;
  std::vector<ScalarField> raw_gamma_bar;
};

/// Exact reverse-mode gradient of the discrete objective with respect to
/// the raw parameter fields.
ObjectiveGradient objective_gradient(const DeformationParams& params,
                                     const Image& fixed, const Image& moving,
                                     const RegistrationConfig& cfg);

/// Instance-wise registration: raw params start at zero (identity transform)
/// and are optimized by adaptive-moment gradient descent. Returns the
/// best-loss iterate. Throws if the loss turns non-finite.
RegistrationResult register_pair(const Image& fixed, const Image& moving,
                                 const RegistrationConfig& cfg);

DetJStats detj_stats_of(const DeformationField& phi);

}  // namespace mmreg
