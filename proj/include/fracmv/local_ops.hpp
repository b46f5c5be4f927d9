#ifndef FRACMV_LOCAL_OPS_HPP
#define FRACMV_LOCAL_OPS_HPP

#include "fracmv/constants.hpp"
#include "fracmv/core.hpp"
#include "fracmv/differences.hpp"
#include "fracmv/fields.hpp"
#include "fracmv/quadrature.hpp"
#include "fracmv/sphere_search.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <string>

namespace fracmv {

/// Choice at critical points: plus takes the sup over directions, minus the
/// inf, automatic the average of the two. Away from critical points all
/// three coincide.
enum class Variant { plus, minus, automatic };

inline const char* to_string(Variant v)
{
    switch (v) {
    case Variant::plus:
        return "plus";
    case Variant::minus:
        return "minus";
    case Variant::automatic:
        return "auto";
    }
    return "auto";
}

inline Variant parse_variant(const std::string& text)
{
    if (text == "plus" || text == "+")
        return Variant::plus;
    if (text == "minus" || text == "-")
        return Variant::minus;
    if (text == "auto" || text.empty())
        return Variant::automatic;
    throw ConfigError("unknown variant '" + text + "' (expected plus, minus or auto)");
}

inline Variant opposite(Variant v)
{
    if (v == Variant::plus)
        return Variant::minus;
    if (v == Variant::minus)
        return Variant::plus;
    return v;
}

inline double laplacian(const ScalarField& u, const Vec& x)
{
    require_point(u, x);
    return u.hessian(x).trace();
}

/// <D^2u z, z> with z = grad u/|grad u|; at critical points the extreme
/// Hessian eigenvalue (plus: largest, minus: smallest, auto: their mean).
inline double infinity_laplacian(const ScalarField& u, const Vec& x, Variant variant = Variant::automatic)
{
    const PointData d = probe(u, x);
    if (!d.critical)
        return d.direction.dot(d.hessian * d.direction);
    Eigen::SelfAdjointEigenSolver<Mat> es(d.hessian, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    switch (variant) {
    case Variant::plus:
        return hi;
    case Variant::minus:
        return lo;
    case Variant::automatic:
        break;
    }
    return 0.5 * (lo + hi);
}

/// Delta u + (p-2) Delta_inf u.
inline double normalized_p_laplacian(const ScalarField& u, const Vec& x, double p, Variant variant = Variant::automatic)
{
    require_exponent(p);
    const double lap = laplacian(u, x);
    if (p == 2.0)
        return lap;
    return lap + (p - 2.0) * infinity_laplacian(u, x, variant);
}

/// |grad u|^{p-2} (Delta u + (p-2) Delta_inf u).
inline double p_laplacian(const ScalarField& u, const Vec& x, double p)
{
    require_exponent(p);
    const PointData d = probe(u, x);
    const double lap = d.hessian.trace();
    if (p == 2.0)
        return lap;
    if (d.critical)
        throw DomainError("p_laplacian with p > 2 is undefined at a critical point (grad u = 0); "
                          "use normalized_p_laplacian with a plus/minus variant");
    const double g = u.gradient(x).norm();
    return std::pow(g, p - 2.0) * (lap + (p - 2.0) * d.direction.dot(d.hessian * d.direction));
}

inline void require_mean_radius(const ScalarField& u, const Vec& x, double r)
{
    require(r > 0.0, "radius r must be positive");
    const double eta = u.smooth_radius(x);
    if (!(r < 0.5 * eta)) {
        std::ostringstream msg;
        msg << "radius r = " << r << " must be below half the smoothness radius " << eta;
        throw DomainError(msg.str());
    }
}

inline constexpr double degenerate_weight = 1e-14;

struct LocalPMeanParts {
    double weight = 0.0;     // int |u(x) - u(x - r w)|^{p-2} dw
    double deviation = 0.0;  // int |u(x) - u(x - r w)|^{p-2} (u(x) - u(x - r w)) dw
};

/// Weight and deviation integrals of the local p-mean, symmetrized over
/// antipodal pairs.
inline LocalPMeanParts local_p_mean_parts(const ScalarField& u, const Vec& x, double r, double p,
    const QuadratureSpec& spec = {})
{
    require_exponent(p);
    require_mean_radius(u, x, r);
    spec.validate();
    const PointData d = probe(u, x);
    const SphereRule half = power_sphere_rule(u.dimension(), p, spec, true, [&] { return level_crossing_angles(u, x, r); });
    LocalPMeanParts parts;
    for (std::size_t i = 0; i < half.size(); ++i) {
        const PairDifference pd = pair_difference(u, d, r * half.nodes[i]);
        parts.weight += 0.5 * half.weights[i] * symmetric_weight_sum(pd.odd, pd.even, p);
        parts.deviation += 0.5 * half.weights[i] * symmetric_power_sum(pd.odd, pd.even, p);
    }
    return parts;
}

/// Sphere average of u(x - r w) weighted by |u(x) - u(x - r w)|^{p-2}.
inline double local_p_mean(const ScalarField& u, const Vec& x, double r, double p, const QuadratureSpec& spec = {})
{
    const LocalPMeanParts parts = local_p_mean_parts(u, x, r, p, spec);
    if (!(parts.weight >= degenerate_weight))
        throw DomainError("local p-mean weight integral vanishes (locally constant field on the sphere)");
    return u.value(x) - parts.deviation / parts.weight;
}

namespace detail {

/// gamma_cap int_cap(xi) (2u(x) - u(x+rw) - u(x-rw))/2 dw, i.e. u(x) - M(xi).
inline double cap_deficit(const ScalarField& u, const PointData& d, double r, const Vec& xi, double cp,
    double gamma_cap, int order)
{
    const SphereRule cap = cap_rule(u.dimension(), xi, cp, order);
    double sum = 0.0;
    for (std::size_t i = 0; i < cap.size(); ++i)
        sum += cap.weights[i] * pair_difference(u, d, r * cap.nodes[i]).even;
    return gamma_cap * sum;
}

template <class F>
double resolve_variant(F&& objective, int n, bool even, int grid, Variant variant)
{
    auto hi = [&] { return optimize_on_sphere(objective, n, Sense::maximize, even, grid).value; };
    auto lo = [&] { return optimize_on_sphere(objective, n, Sense::minimize, even, grid).value; };
    switch (variant) {
    case Variant::plus:
        return hi();
    case Variant::minus:
        return lo();
    case Variant::automatic:
        break;
    }
    return 0.5 * (hi() + lo());
}

} // namespace detail

/// (gamma_cap/2) int (u(x+rw) + u(x-rw)) chi_[c_p,1](w . z) dw with z the
/// gradient direction; at critical points plus/minus take sup/inf over z.
inline double local_grad_p_mean(const ScalarField& u, const Vec& x, double r, double p,
    Variant variant = Variant::automatic, const QuadratureSpec& spec = {})
{
    require_exponent(p);
    require_mean_radius(u, x, r);
    spec.validate();
    const int n = u.dimension();
    require(n == 2 || n == 3, "gradient-dependent cap kernel requires n in {2,3}");
    const double cp = solve_cap_threshold(p, n);
    const CapMoments cm = cap_moments(cp, n);
    const PointData d = probe(u, x);
    if (!d.critical)
        return d.value - detail::cap_deficit(u, d, r, d.direction, cp, cm.gamma_cap, spec.sphere_order);
    auto mean = [&](const Vec& xi) {
        return d.value - detail::cap_deficit(u, d, r, xi, cp, cm.gamma_cap, spec.sphere_order);
    };
    return detail::resolve_variant(mean, n, true, spec.sphere_order, variant);
}

/// (u(x + r z) + u(x - r z)) / 2; at critical points the midrange
/// (max + min)/2 of u over the sphere of radius r, for every variant.
inline double local_infinity_mean(const ScalarField& u, const Vec& x, double r, Variant variant = Variant::automatic,
    const QuadratureSpec& spec = {})
{
    (void)variant;
    require_mean_radius(u, x, r);
    spec.validate();
    const PointData d = probe(u, x);
    if (!d.critical)
        return d.value - pair_difference(u, d, r * d.direction).even;
    auto on_sphere = [&](const Vec& w) { return u.value(x + r * w); };
    const int n = u.dimension();
    const double hi = optimize_on_sphere(on_sphere, n, Sense::maximize, false, spec.sphere_order).value;
    const double lo = optimize_on_sphere(on_sphere, n, Sense::minimize, false, spec.sphere_order).value;
    return 0.5 * (hi + lo);
}

} // namespace fracmv

#endif // FRACMV_LOCAL_OPS_HPP
