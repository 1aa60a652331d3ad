#pragma once

#include <vector>

#include "mmreg/field.hpp"

namespace mmreg {

/// out(xi) = img sampled at phi(xi) with linear interpolation and boundary
/// clamping. img and phi must share a grid.
Image warp_image(const Image& img, const DeformationField& phi);

/// Nearest-neighbor sampling so labels stay categorical.
Mask warp_mask(const Mask& mask, const DeformationField& phi);

/// Cotangent of the warped image pulled back onto the transform targets
/// (axis-major, same layout as DeformationField::targets). The image is
/// data, not a differentiated input.
std::vector<double> warp_vjp_phi(const Image& img, const DeformationField& phi,
                                 const ScalarField& out_bar);

}  // namespace mmreg
