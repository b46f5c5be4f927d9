#ifndef FRACMV_DIFFERENCES_HPP
#define FRACMV_DIFFERENCES_HPP

#include "fracmv/core.hpp"
#include "fracmv/fields.hpp"
#include "fracmv/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <optional>
#include <vector>

namespace fracmv {

/// Below this fraction of the smoothness radius, differences are taken from
/// the second-order Taylor polynomial instead of value subtraction.
inline constexpr double taylor_fraction = 1e-4;

/// Everything the integrands need at the evaluation point.
struct PointData {
    Vec x;
    double value = 0.0;
    Vec gradient;  // zeroed at critical points
    Mat hessian;
    double eta = 0.0;
    double taylor_radius = 0.0;
    bool critical = false;
    Vec direction;  // grad / |grad| when not critical
};

inline PointData probe(const ScalarField& u, const Vec& x)
{
    require_point(u, x);
    PointData d;
    d.x = x;
    d.value = u.value(x);
    d.gradient = u.gradient(x);
    d.hessian = u.hessian(x);
    d.eta = u.smooth_radius(x);
    d.taylor_radius = taylor_fraction * d.eta;
    d.critical = d.gradient.norm() < critical_gradient_threshold * (1.0 + u.sup_norm());
    if (d.critical) {
        d.gradient.setZero();
        d.direction = Vec::Zero(x.size());
    } else {
        d.direction = d.gradient.normalized();
    }
    return d;
}

/// Odd and even parts of the increments at +-y:
/// odd = (u(x+y) - u(x-y)) / 2, even = (2u(x) - u(x+y) - u(x-y)) / 2,
/// so u(x) - u(x+y) = even - odd and u(x) - u(x-y) = even + odd.
struct PairDifference {
    double odd = 0.0;
    double even = 0.0;

    double plus() const { return even - odd; }   // u(x) - u(x+y)
    double minus() const { return even + odd; }  // u(x) - u(x-y)
};

inline PairDifference pair_difference(const ScalarField& u, const PointData& d, const Vec& y)
{
    const double rho = y.norm();
    if (rho < d.taylor_radius)
        return {d.gradient.dot(y), -0.5 * y.dot(d.hessian * y)};
    const double dp = u.increment(d.x, y);
    const double dm = u.increment(d.x, Vec(-y));
    return {0.5 * (dp - dm), -0.5 * (dp + dm)};
}

/// Where the integrands become constant: beyond `radius` (at least the
/// requested minimum) u(x) - u(x +- y) equals `delta`.
struct FarIncrement {
    double radius = 0.0;
    double level = 0.0;
    double delta = 0.0;
};

inline std::optional<FarIncrement> far_increment(const ScalarField& u, const PointData& d, double min_radius)
{
    const auto f = u.far_field(d.x);
    if (!f)
        return std::nullopt;
    return FarIncrement{std::max(f->radius, min_radius), f->level, d.value - f->level};
}

/// Guards the closed-form tail: the quadrature must reach the far radius.
inline void require_far_reach(const RadialRule& rule, const FarIncrement& far)
{
    if (rule.radius < far.radius)
        throw NumericalError("node budget stops the radial rule short of the far-field radius");
}

/// In the plane the angular integrands of the p-power operators have
/// algebraic singularities unless p is an even integer (then they are
/// polynomial in the increments).
inline bool has_power_kinks(int n, double p)
{
    return n == 2 && !(p == std::floor(p) && std::fmod(p, 2.0) == 0.0);
}

/// Angles theta in [0, 2pi) with u(x + r w(theta)) = u(x), n = 2: sign
/// changes of the increment on an equispaced grid, refined by TOMS 748.
/// Tangential zeros without a sign change are not reported.
inline std::vector<double> level_crossing_angles(const ScalarField& u, const Vec& x, double r, int samples = 128)
{
    std::vector<double> roots;
    if (u.dimension() != 2)
        return roots;
    auto f = [&](double t) {
        Vec w(2);
        w << std::cos(t), std::sin(t);
        return u.increment(x, r * w);
    };
    const double h = 2.0 * pi / samples;
    double a = 0.0, fa = f(0.0);
    for (int k = 1; k <= samples; ++k) {
        const double b = k * h;
        const double fb = f(b);
        if (fa == 0.0) {
            roots.push_back(a);
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            std::uintmax_t iterations = 100;
            const auto br = boost::math::tools::toms748_solve(
                f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), iterations);
            roots.push_back(0.5 * (br.first + br.second));
        }
        a = b;
        fa = fb;
    }
    return roots;
}

/// Directions in which the increment at x vanishes to leading order, n = 2:
/// the normal to the gradient, or at critical points the null directions
/// of the Hessian form (none when it is definite or zero).
inline std::vector<double> origin_singular_angles(const PointData& d)
{
    if (d.x.size() != 2)
        return {};
    if (!d.critical)
        return {std::atan2(d.direction(1), d.direction(0)) + 0.5 * pi};
    const double a = d.hessian(0, 0), b = d.hessian(0, 1), c = d.hessian(1, 1);
    // w.Hw = (a+c)/2 + R cos(2 theta - phi)
    const double R = std::hypot(0.5 * (a - c), b);
    const double mean = 0.5 * (a + c);
    if (!(R > 0.0) || std::abs(mean) > R)
        return {};
    const double phi = std::atan2(b, 0.5 * (a - c));
    const double spread = std::acos(-mean / R);
    return {0.5 * (phi + spread), 0.5 * (phi - spread)};
}

/// In the plane, the directions normal to a ridge field's wave vector.
inline std::vector<double> ridge_angles(const ScalarField& u)
{
    const auto k = u.ridge_normal();
    if (!k || u.dimension() != 2)
        return {};
    return {std::atan2((*k)(1), (*k)(0)) + 0.5 * pi};
}

/// Angular rule for the p-power integrands: graded at the given singular
/// angles in the plane, the plain rule otherwise. `angles` is only called
/// when the grading is needed.
template <class Angles>
SphereRule power_sphere_rule(int n, double p, const QuadratureSpec& spec, bool half, Angles&& angles,
    bool force = false)
{
    if (!has_power_kinks(n, p) && !(force && n == 2))
        return half ? hemisphere_rule(n, spec.sphere_order) : sphere_rule(n, spec.sphere_order);
    return graded_circle_rule(angles(), spec.sphere_order, half);
}

/// phi(e + b) + phi(e - b) with phi(t) = |t|^{p-2} t, evaluated without the
/// cancellation of the direct sum when |e| << |b|.
inline double symmetric_power_sum(double b, double e, double p)
{
    if (p == 2.0)
        return 2.0 * e;
    const double q = p - 2.0;
    if (b == 0.0)
        return 2.0 * signed_power(e, q);
    const double t = e / b;
    if (std::abs(t) <= 0.5) {
        // phi(b) [(1+t)^{p-1} - (1-t)^{p-1}]
        const double m = 0.5 * (p - 1.0) * std::log1p(-t * t);
        return signed_power(b, q) * 2.0 * std::exp(m) * std::sinh((p - 1.0) * std::atanh(t));
    }
    return signed_power(e + b, q) + signed_power(e - b, q);
}

/// |e + b|^{p-2} + |e - b|^{p-2}
inline double symmetric_weight_sum(double b, double e, double p)
{
    const double q = p - 2.0;
    return abs_power(e + b, q) + abs_power(e - b, q);
}

} // namespace fracmv

#endif // FRACMV_DIFFERENCES_HPP
