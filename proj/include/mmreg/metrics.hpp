#pragma once

#include <array>
#include <vector>

#include "mmreg/field.hpp"
#include "mmreg/registration.hpp"

namespace mmreg {

/// 2|A n B| / (|A| + |B|) for the given label. Both regions empty -> 1.0
/// by convention; exactly one empty -> 0.0.
double dice(const Mask& a, const Mask& b, int label);

/// Foreground points of the label with at least one face-adjacent
/// background neighbor (out-of-grid counts as background). Pixel index
/// coordinates, one entry per contour point.
std::vector<std::array<int, 3>> contour_points(const Mask& m, int label);

/// Symmetric Hausdorff distance between the two label contours, Euclidean
/// in physical units (pixel offsets scaled by the grid spacing). Throws if
/// either region is empty.
double hausdorff_mm(const Mask& a, const Mask& b, int label);

/// (min, max, % of points with det <= 0) of jacobian_determinant(phi).
DetJStats detj_stats(const DeformationField& phi);

/// R(d): fraction of cases with Dice strictly greater than d. Throws on an
/// empty list; d must be in [0, 1].
double reliability(const std::vector<double>& dice_values, double d);

}  // namespace mmreg
