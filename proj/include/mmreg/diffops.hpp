#pragma once

#include "mmreg/field.hpp"

namespace mmreg {

/// Partial derivative along one axis in pixel units: central differences at
/// interior points, first-order one-sided differences on the boundary.
ScalarField axis_derivative(const ScalarField& f, int axis);

/// Adjoint (transpose) of axis_derivative as a linear operator.
ScalarField axis_derivative_adjoint(const ScalarField& cotangent, int axis);

/// One derivative field per axis. Requires >= 3 samples per axis.
VectorField gradient_central(const ScalarField& f);

ScalarField divergence(const VectorField& v);

/// dV1/dx0 - dV0/dx1 (2D only).
ScalarField curl2d(const VectorField& v);

/// Standard 3D curl, one rotational component per axis (3D only).
VectorField curl3d(const VectorField& v);

/// Determinant of the matrix of per-axis partials of phi at each point.
ScalarField jacobian_determinant(const DeformationField& phi);

}  // namespace mmreg
