#pragma once

#include <Eigen/Dense>

#include "maxent/errors.hpp"

namespace maxent {

// Ellipsoid restricted to an affine subspace: the point set is
//   { anchor + basis * y : (y - center)^T shape^-1 (y - center) <= 1 },
// with `basis` orthonormal, so subspace geometry equals ambient geometry.
struct EllipsoidState {
    Eigen::VectorXd anchor;
    Eigen::MatrixXd basis;   // m x r, orthonormal columns
    Eigen::VectorXd center;  // r, subspace coordinates
    Eigen::MatrixXd shape;   // r x r, symmetric positive definite

    Eigen::VectorXd ambient_center() const { return anchor + basis * center; }
    int dimension() const { return static_cast<int>(basis.cols()); }
};

// Ball of the given radius around the anchor. Throws BadBasis when the basis
// columns are not orthonormal to 1e-10.
EllipsoidState init_ball(Eigen::VectorXd anchor, Eigen::MatrixXd basis, double radius);

struct CutInfo {
    // Exact volume ratio of the update; always <= exp(-1 / (2 dim)).
    double volume_ratio = 1.0;
};

// Replace the ellipsoid by the minimum-volume ellipsoid containing the half
//   { x : <normal, x - center> <= 0 }.
// The normal is given in ambient coordinates and is projected onto the
// subspace first; DegenerateNormal if the projection has norm <= 1e-12.
CutInfo central_cut(EllipsoidState& state, const Eigen::VectorXd& normal);

// Radius of the smallest enclosing ball: sqrt of the largest eigenvalue of
// the shape matrix. Throws NumericalFailure if the shape lost positive
// definiteness.
double enclosing_radius(const EllipsoidState& state);

} // namespace maxent
