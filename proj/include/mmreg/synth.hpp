#pragma once

#include <cstdint>

#include "mmreg/field.hpp"
#include "mmreg/moving_mesh.hpp"

namespace mmreg {

enum class TemplateShape { annulus, disc, two_label };

/// Ground-truth generator configuration. Amplitudes are max-abs values of
/// the raw parameter fields before projection, so the projected monitor
/// always stays inside (tau_lb, tau_ub).
struct SynthConfig {
  Grid grid;
  TemplateShape shape = TemplateShape::annulus;
  double cutoff = 0.15;          // low-pass cutoff as fraction of bandwidth, (0, 0.5]
  double mu_amplitude = 0.24;    // raw_mu max-abs
  double gamma_amplitude = 0.24; // raw_gamma max-abs
  double tau_lb = 0.2;
  double tau_ub = 8.0;
  double gamma_scale = 10.0;
  std::uint64_t seed = 0;
  int gt_steps = 200;  // reference integration dominates downstream error
};

/// Seeded random raw fields, spectrally low-passed and scaled to the
/// configured amplitudes. Deterministic per seed.
DeformationParams sample_params(const SynthConfig& cfg);

struct SynthPair {
  Image fixed;
  Image moving;
  Mask fixed_mask;
  Mask moving_mask;
  DeformationField phi_gt_f;
  DeformationField phi_gt_b;
};

/// Renders the template as (fixed, fixed_mask) and warps both through the
/// backward ground-truth transform, so warping the moving image by phi_gt_f
/// recovers the fixed image up to interpolation.
SynthPair make_pair(const SynthConfig& cfg);

/// The analytic template on its own (fixed image + mask).
void render_template(const SynthConfig& cfg, Image& img, Mask& mask);

}  // namespace mmreg
