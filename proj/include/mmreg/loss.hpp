#pragma once

#include "mmreg/field.hpp"

namespace mmreg {

enum class Dissimilarity { automatic, mse, ncc };

/// Mean of squared intensity differences.
double loss_mse(const Image& a, const Image& b);
ScalarField loss_mse_grad_b(const Image& a, const Image& b);

/// 1 - global zero-mean normalized cross-correlation; in [0, 2], zero iff
/// b is a positive affine rescaling of a. Throws on zero-variance input.
double loss_ncc(const Image& a, const Image& b);
ScalarField loss_ncc_grad_b(const Image& a, const Image& b);

double dissimilarity_loss(Dissimilarity kind, const Image& a, const Image& b);
ScalarField dissimilarity_grad_b(Dissimilarity kind, const Image& a, const Image& b);

/// MSE for 2D grids, NCC for 3D when set to automatic.
Dissimilarity resolve_dissimilarity(Dissimilarity kind, const Grid& grid);

}  // namespace mmreg
