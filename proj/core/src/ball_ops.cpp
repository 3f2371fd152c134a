#include "gil/ball_ops.hpp"

#include <cmath>

#include "gil/error.hpp"

namespace gil::model::ball {

using ad::Var;

namespace {
constexpr double kTiny = 1e-15;  // norm floor before divisions

double sqrt_c(double c) {
    require(c > 0.0, "ball ops: curvature must be positive");
    return std::sqrt(c);
}
}  // namespace

Var project_rows(Var x, double c) {
    ad::Tape& t = *x.tape;
    const double limit = (1.0 - manifold::kBallEps) / sqrt_c(c);
    Var n = t.clamp_min(t.row_norm(x), kTiny);
    Var ratio = t.div(t.constant(Tensor::full(x.rows(), 1, limit)), n);
    Var factor = t.clamp_max(ratio, 1.0);
    return t.scale_rows(x, factor);
}

Var mobius_add_rows(Var x, Var y, double c) {
    ad::Tape& t = *x.tape;
    Var xy = t.row_dot(x, y);
    Var x2 = t.row_dot(x, x);
    Var y2 = t.row_dot(y, y);
    // a = 1 + 2c<x,y> + c|y|^2 ; b = 1 - c|x|^2 ; den = 1 + 2c<x,y> + c^2 |x|^2 |y|^2
    Var a = t.add_const(t.add(t.mul_const(xy, 2.0 * c), t.mul_const(y2, c)), 1.0);
    Var b = t.add_const(t.mul_const(x2, -c), 1.0);
    Var den = t.add_const(t.add(t.mul_const(xy, 2.0 * c), t.mul_const(t.mul(x2, y2), c * c)), 1.0);
    Var num = t.add(t.scale_rows(x, a), t.scale_rows(y, b));
    Var out = t.scale_rows(num, t.div(t.constant(Tensor::full(x.rows(), 1, 1.0)), den));
    return project_rows(out, c);
}

Var mobius_scalar_mul_rows(Var r, Var x, double c) {
    ad::Tape& t = *x.tape;
    const double sc = sqrt_c(c);
    Var nx = t.clamp_min(t.row_norm(x), kTiny);
    Var scaled = t.tanh(t.mul(r, t.artanh(t.mul_const(nx, sc))));
    Var factor = t.div(scaled, t.mul_const(nx, sc));
    return project_rows(t.scale_rows(x, factor), c);
}

Var mobius_matvec_rows(Var x, Var w, double c) {
    ad::Tape& t = *x.tape;
    const double sc = sqrt_c(c);
    Var q = t.matmul(x, w);
    Var nx = t.clamp_min(t.row_norm(x), kTiny);
    Var nq = t.clamp_min(t.row_norm(q), kTiny);
    Var arg = t.mul(t.div(nq, nx), t.artanh(t.mul_const(nx, sc)));
    Var factor = t.div(t.tanh(arg), t.mul_const(nq, sc));
    return project_rows(t.scale_rows(q, factor), c);
}

Var exp0_rows(Var v, double c) {
    ad::Tape& t = *v.tape;
    const double sc = sqrt_c(c);
    Var nv = t.clamp_min(t.row_norm(v), kTiny);
    Var factor = t.div(t.tanh(t.mul_const(nv, sc)), t.mul_const(nv, sc));
    return project_rows(t.scale_rows(v, factor), c);
}

Var log0_rows(Var x, double c) {
    ad::Tape& t = *x.tape;
    const double sc = sqrt_c(c);
    Var nx = t.clamp_min(t.row_norm(x), kTiny);
    Var factor = t.div(t.artanh(t.mul_const(nx, sc)), t.mul_const(nx, sc));
    return t.scale_rows(x, factor);
}

Var distance_rows(Var x, Var y, double c) {
    ad::Tape& t = *x.tape;
    const double sc = sqrt_c(c);
    Var diff = mobius_add_rows(t.neg(x), y, c);
    return t.mul_const(t.artanh(t.mul_const(t.row_norm(diff), sc)), 2.0 / sc);
}

Var hyperplane_logit_rows(Var x, Var p, Var u, double c) {
    ad::Tape& t = *x.tape;
    const double sc = sqrt_c(c);
    require(p.rows() == 1 && u.rows() == 1, "hyperplane_logit_rows: p and u must be single rows");
    const int n = x.rows();
    std::vector<int> rep(static_cast<size_t>(n), 0);
    Var pn = t.gather_rows(p, rep);
    Var un = t.gather_rows(u, rep);
    Var q = mobius_add_rows(t.neg(pn), x, c);
    Var qu = t.row_dot(q, un);
    Var q2 = t.row_dot(q, q);
    Var nu = t.clamp_min(t.row_norm(un), kTiny);
    Var denom = t.mul(t.add_const(t.mul_const(q2, -c), 1.0), nu);
    // asinh is odd, so the sign of <q,u> rides along; multiplying by ||u||/sqrt(c)
    // yields sign * ||u|| * distance-to-hyperplane
    Var arg = t.div(t.mul_const(qu, 2.0 * sc), denom);
    return t.mul_const(t.mul(t.asinh(arg), nu), 1.0 / sc);
}

Var fermi_dirac(Var dist, double r, double t_param) {
    require(t_param > 0.0, "fermi_dirac: temperature must be positive");
    ad::Tape& t = *dist.tape;
    // 1/(exp((d-r)/t)+1) == sigmoid(-(d-r)/t)
    return t.sigmoid(t.mul_const(t.add_const(dist, -r), -1.0 / t_param));
}

}  // namespace gil::model::ball
