#pragma once

#include "gil/autodiff.hpp"
#include "gil/manifold.hpp"

namespace gil::model {

/// Differentiable Poincare-ball operations applied row-wise to tape tensors:
/// each row of an n x d Var is one ball point (or tangent vector). These
/// mirror the closed forms in gil::manifold, composed from tape primitives so
/// gradients flow through them.
namespace ball {

/// Rescale rows that violate sqrt(c)*||row|| <= 1 - kBallEps back onto that shell.
ad::Var project_rows(ad::Var x, double c);

/// Row-wise Mobius addition x_i (+)_c y_i.
ad::Var mobius_add_rows(ad::Var x, ad::Var y, double c);

/// Row-wise Mobius scalar multiplication r_i (x)_c x_i with r an n x 1 Var.
ad::Var mobius_scalar_mul_rows(ad::Var r, ad::Var x, double c);

/// Row-wise Mobius matrix multiplication (x_i W) with the gyro rescaling.
/// W is stored input-dim x output-dim.
ad::Var mobius_matvec_rows(ad::Var x, ad::Var w, double c);

/// Exponential map at the origin applied to tangent rows.
ad::Var exp0_rows(ad::Var v, double c);

/// Logarithmic map at the origin applied to ball rows.
ad::Var log0_rows(ad::Var x, double c);

/// Row-wise geodesic distance (n x 1).
ad::Var distance_rows(ad::Var x, ad::Var y, double c);

/// Signed hyperbolic-hyperplane logit ||u|| * d(x, H) with the sign of
/// <-p (+) x, u>; p and u are 1 x d (one class), x is n x d. Returns n x 1.
ad::Var hyperplane_logit_rows(ad::Var x, ad::Var p, ad::Var u, double c);

/// Fermi-Dirac edge probability 1 / (exp((d - r)/t) + 1) elementwise.
ad::Var fermi_dirac(ad::Var dist, double r, double t);

}  // namespace ball
}  // namespace gil::model
