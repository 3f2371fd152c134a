#include "gil/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace gil::manifold {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void check_pair(const BallPoint& x, const BallPoint& y, const char* op) {
    require(x.dim() == y.dim(), std::string(op) + ": dimension mismatch");
    require(x.curvature.c == y.curvature.c, std::string(op) + ": curvature mismatch");
}

void check_finite(const std::vector<double>& xs, const char* op) {
    for (double x : xs)
        require(std::isfinite(x), std::string(op) + ": non-finite input");
}

}  // namespace

double artanh(double x) {
    const double lim = 1.0 - kArtanhEps;
    x = std::clamp(x, -lim, lim);
    return std::atanh(x);
}

double BallPoint::norm() const { return manifold::norm(coords); }
double TangentVector::norm() const { return manifold::norm(coords); }

BallPoint BallPoint::origin(int dim, Curvature c) {
    return BallPoint{std::vector<double>(static_cast<size_t>(dim), 0.0), c};
}

BallPoint project_to_ball(const std::vector<double>& x, Curvature c) {
    check_finite(x, "project_to_ball");
    double n = norm(x);
    double limit = (1.0 - kBallEps) / c.sqrt_c();
    if (n <= limit) return BallPoint{x, c};
    std::vector<double> scaled(x);
    double f = limit / n;
    for (double& e : scaled) e *= f;
    return BallPoint{std::move(scaled), c};
}

BallPoint negate(const BallPoint& x) {
    std::vector<double> nx(x.coords);
    for (double& e : nx) e = -e;
    return BallPoint{std::move(nx), x.curvature};
}

BallPoint mobius_add(const BallPoint& x, const BallPoint& y) {
    check_pair(x, y, "mobius_add");
    const double c = x.curvature.c;
    const double xy = dot(x.coords, y.coords);
    const double x2 = dot(x.coords, x.coords);
    const double y2 = dot(y.coords, y.coords);
    const double a = 1.0 + 2.0 * c * xy + c * y2;
    const double b = 1.0 - c * x2;
    double d = 1.0 + 2.0 * c * xy + c * c * x2 * y2;
    if (std::abs(d) < 1e-15) d = d < 0 ? -1e-15 : 1e-15;
    std::vector<double> out(x.coords.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = (a * x.coords[i] + b * y.coords[i]) / d;
    return project_to_ball(out, x.curvature);
}

BallPoint mobius_scalar_mul(double r, const BallPoint& x) {
    require(std::isfinite(r), "mobius_scalar_mul: non-finite scalar");
    const double sc = x.curvature.sqrt_c();
    const double n = x.norm();
    if (n == 0.0) return x;  // limit value at the origin
    const double f = std::tanh(r * artanh(sc * n)) / (sc * n);
    std::vector<double> out(x.coords);
    for (double& e : out) e *= f;
    return project_to_ball(out, x.curvature);
}

BallPoint mobius_matvec(const Tensor& m, const BallPoint& x) {
    require(m.cols == x.dim(), "mobius_matvec: matrix column count does not match point dimension");
    const double sc = x.curvature.sqrt_c();
    const double nx = x.norm();
    std::vector<double> mx(static_cast<size_t>(m.rows), 0.0);
    for (int r = 0; r < m.rows; ++r) {
        double s = 0.0;
        for (int k = 0; k < m.cols; ++k) s += m.at(r, k) * x.coords[k];
        mx[static_cast<size_t>(r)] = s;
    }
    const double nmx = norm(mx);
    if (nx == 0.0 || nmx == 0.0)
        return BallPoint::origin(m.rows, x.curvature);
    const double f = std::tanh((nmx / nx) * artanh(sc * nx)) / (sc * nmx);
    for (double& e : mx) e *= f;
    return project_to_ball(mx, x.curvature);
}

BallPoint exp_map(const BallPoint& x, const TangentVector& v) {
    require(v.basepoint.coords == x.coords && v.basepoint.curvature.c == x.curvature.c,
            "exp_map: tangent vector basepoint mismatch");
    check_finite(v.coords, "exp_map");
    const double nv = v.norm();
    if (nv == 0.0) return x;
    const double sc = x.curvature.sqrt_c();
    const double lam = conformal_factor(x);
    const double f = std::tanh(sc * lam * nv / 2.0) / (sc * nv);
    BallPoint step{std::vector<double>(v.coords), x.curvature};
    for (double& e : step.coords) e *= f;
    return mobius_add(x, step);
}

TangentVector log_map(const BallPoint& x, const BallPoint& y) {
    check_pair(x, y, "log_map");
    BallPoint diff = mobius_add(negate(x), y);
    const double nd = diff.norm();
    if (nd == 0.0) return TangentVector{std::vector<double>(x.coords.size(), 0.0), x};
    const double sc = x.curvature.sqrt_c();
    const double lam = conformal_factor(x);
    const double f = (2.0 / (sc * lam)) * artanh(sc * nd) / nd;
    std::vector<double> out(diff.coords);
    for (double& e : out) e *= f;
    return TangentVector{std::move(out), x};
}

double distance(const BallPoint& x, const BallPoint& y) {
    check_pair(x, y, "distance");
    const double sc = x.curvature.sqrt_c();
    BallPoint diff = mobius_add(negate(x), y);
    return (2.0 / sc) * artanh(sc * diff.norm());
}

double hyperplane_distance(const BallPoint& x, const BallPoint& p, const TangentVector& u) {
    check_pair(x, p, "hyperplane_distance");
    require(u.norm() > 0.0, "hyperplane_distance: zero normal vector");
    require(u.basepoint.coords == p.coords, "hyperplane_distance: normal not based at p");
    const double c = x.curvature.c;
    const double sc = x.curvature.sqrt_c();
    BallPoint q = mobius_add(negate(p), x);
    const double qu = dot(q.coords, u.coords);
    const double q2 = dot(q.coords, q.coords);
    const double denom = (1.0 - c * q2) * u.norm();
    return (1.0 / sc) * std::asinh(2.0 * sc * std::abs(qu) / denom);
}

double conformal_factor(const BallPoint& x) {
    const double c = x.curvature.c;
    const double n2 = dot(x.coords, x.coords);
    return 2.0 / (1.0 - c * n2);
}

}  // namespace gil::manifold
