#pragma once

#include <vector>

#include "gil/error.hpp"
#include "gil/tensor.hpp"

namespace gil::manifold {

/// Projection margin: ball points are kept at norm <= (1 - kBallEps) / sqrt(c).
inline constexpr double kBallEps = 1e-5;
/// Inputs to artanh are clamped into [-(1 - kArtanhEps), 1 - kArtanhEps].
inline constexpr double kArtanhEps = 1e-10;

double artanh(double x);  // clamped inverse hyperbolic tangent

/// Magnitude of the ball's constant negative curvature; ball radius is 1/sqrt(c).
struct Curvature {
    double c = 1.0;

    Curvature() = default;
    explicit Curvature(double value) : c(value) {
        require(value > 0.0 && std::isfinite(value), "Curvature: c must be positive and finite");
    }
    double sqrt_c() const { return std::sqrt(c); }
};

/// A point of the curvature-c Poincare ball. Every constructing operation
/// safe-projects, so sqrt(c)*||coords|| <= 1 - kBallEps always holds.
struct BallPoint {
    std::vector<double> coords;
    Curvature curvature;

    int dim() const { return static_cast<int>(coords.size()); }
    double norm() const;
    bool is_origin(double tol = 0.0) const { return norm() <= tol; }

    static BallPoint origin(int dim, Curvature c);
};

/// A vector of the tangent space at `basepoint`. Finite entries, no norm bound.
struct TangentVector {
    std::vector<double> coords;
    BallPoint basepoint;

    int dim() const { return static_cast<int>(coords.size()); }
    double norm() const;
};

/// Rescale a raw vector into the ball when sqrt(c)*||x|| > 1 - kBallEps.
BallPoint project_to_ball(const std::vector<double>& x, Curvature c);

/// Mobius addition x (+)_c y.
BallPoint mobius_add(const BallPoint& x, const BallPoint& y);

/// Mobius scalar multiplication r (x)_c x; origin maps to origin.
BallPoint mobius_scalar_mul(double r, const BallPoint& x);

/// Mobius matrix multiplication M (x)_c x; m-by-n matrix applied to an
/// n-dimensional point. Origin maps to origin, and so does any x with Mx = 0.
BallPoint mobius_matvec(const Tensor& m, const BallPoint& x);

/// Exponential map at basepoint x of tangent vector v.
BallPoint exp_map(const BallPoint& x, const TangentVector& v);

/// Logarithmic map at x of y; inverse of exp_map.
TangentVector log_map(const BallPoint& x, const BallPoint& y);

/// Geodesic distance (2/sqrt(c)) * artanh(sqrt(c) * ||-x (+)_c y||).
double distance(const BallPoint& x, const BallPoint& y);

/// Distance from x to the hyperbolic affine hyperplane through p with normal u.
/// The denominator uses the squared norm 1 - c*||-p (+)_c x||^2.
double hyperplane_distance(const BallPoint& x, const BallPoint& p, const TangentVector& u);

/// Conformal factor lambda_x = 2 / (1 - c*||x||^2); >= 2 with equality at the origin.
double conformal_factor(const BallPoint& x);

BallPoint negate(const BallPoint& x);

}  // namespace gil::manifold
