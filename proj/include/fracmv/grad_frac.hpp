#ifndef FRACMV_GRAD_FRAC_HPP
#define FRACMV_GRAD_FRAC_HPP

#include "fracmv/constants.hpp"
#include "fracmv/core.hpp"
#include "fracmv/differences.hpp"
#include "fracmv/fields.hpp"
#include "fracmv/frac_p.hpp"
#include "fracmv/local_ops.hpp"
#include "fracmv/quadrature.hpp"
#include "fracmv/sphere_search.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fracmv {

/// Cap threshold and normalizers for the gradient-dependent kernel.
struct CapKernel {
    double threshold = 0.0;  // c_p
    double alpha = 0.0;
    double beta = 0.0;
    double gamma_cap = 0.0;
    double mass = 0.0;       // int chi = 1/gamma_cap

    static CapKernel make(int n, double p)
    {
        require(n == 2 || n == 3, "gradient-dependent cap kernel requires n in {2,3}");
        CapKernel k;
        k.threshold = solve_cap_threshold(p, n);
        const CapMoments m = cap_moments(k.threshold, n);
        k.alpha = m.alpha;
        k.beta = m.beta;
        k.gamma_cap = m.gamma_cap;
        k.mass = 1.0 / m.gamma_cap;
        return k;
    }
};

/// C_{s,p} = c(s) gamma_cap with c(s) = 2 sin(pi s)/pi.
inline double cap_mean_constant(double s, const CapKernel& cap)
{
    return radial_tail_constant(s) * cap.gamma_cap;
}

namespace detail {

/// Reduced resolution used while searching directions at critical points.
inline QuadratureSpec search_spec(const QuadratureSpec& spec)
{
    QuadratureSpec q = spec;
    q.smooth_nodes = std::max(16, spec.smooth_nodes / 4);
    q.jacobi_nodes = std::max(16, spec.jacobi_nodes / 2);
    q.sphere_order = std::max(8, spec.sphere_order / 2);
    q.self_check = false;
    return q;
}

struct RayBounds {
    double bound;     // |2u(x) - u(x+y) - u(x-y)| / 2 <= bound |y|^exponent, |y| >= 1
    double exponent;
};

inline RayBounds even_part_growth(const ScalarField& u, const PointData& d)
{
    const Growth g = u.growth(d.x);
    return {std::abs(d.value) + g.constant + g.coefficient, g.exponent};
}

/// int_cap(xi) int_0^inf E(rho w) rho^{-1-2s} drho dw, E the even part.
inline OperatorResult cap_operator_integral(const ScalarField& u, const PointData& d, double s, const CapKernel& cap,
    const Vec& xi, const QuadratureSpec& spec)
{
    const RayBounds eg = even_part_growth(u, d);
    const double rho0 = 0.25 * d.eta;
    const auto far = far_increment(u, d, std::max(2.0 * rho0, 1.0));
    const double kappa = 2.0 * s - eg.exponent;
    if (!far && !(kappa > 0.0))
        throw NumericalError("cap operator tail diverges: field growth exponent >= 2s");
    const double sup = eg.bound * cap.mass;
    const TruncationRadius tr = far ? TruncationRadius{far->radius, false}
                                    : truncation_radius(spec.truncation_tol, sup, kappa, spec.max_radius_cap);
    const double radius = std::max({tr.radius, 2.0 * rho0, 1.0});
    auto rules = directional_rules(u, d.x, [&](const std::vector<double>& bp) {
        return power_rule(rho0, 1.0 - 2.0 * s, radius, spec, bp, u.oscillation_length());
    });
    const SphereRule rule = cap_rule(u.dimension(), xi, cap.threshold, spec.sphere_order);
    OperatorResult res;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Vec& w = rule.nodes[i];
        const RadialRule& radial = rules(w);
        double sum = 0.0;
        for (std::size_t j = 0; j < radial.size(); ++j) {
            const double rho = radial.nodes[j];
            sum += radial.weights[j] * pair_difference(u, d, rho * w).even / (rho * rho);
        }
        if (far) {
            require_far_reach(radial, *far);
            sum += far->delta * std::pow(radial.radius, -2.0 * s) / (2.0 * s);
        }
        res.value += rule.weights[i] * sum;
        res.nodes += radial.size();
        res.radius = std::max(res.radius, radial.radius);
        res.capped = res.capped || radial.capped;
    }
    res.capped = res.capped || tr.capped;
    res.tail_bound = far ? 0.0 : sup * std::pow(res.radius, -kappa) / kappa;
    return res;
}

/// int_cap(xi) int_r^inf E(rho w) rho^{-1} (rho^2 - r^2)^{-s} drho dw.
inline OperatorResult cap_mean_integral(const ScalarField& u, const PointData& d, double s, double r,
    const CapKernel& cap, const Vec& xi, const QuadratureSpec& spec)
{
    const RayBounds eg = even_part_growth(u, d);
    const Decay decay{eg.bound * cap.mass, 1.0 - eg.exponent};
    const auto far = far_increment(u, d, 2.0 * r);
    const TruncationRadius tr = far ? TruncationRadius{far->radius, false} : annulus_truncation(r, s, decay, spec);
    auto rules = directional_rules(u, d.x, [&](const std::vector<double>& bp) {
        return annulus_rule(r, s, tr.radius, spec, bp, u.oscillation_length());
    });
    const SphereRule rule = cap_rule(u.dimension(), xi, cap.threshold, spec.sphere_order);
    OperatorResult res;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Vec& w = rule.nodes[i];
        const RadialRule& radial = rules(w);
        double sum = 0.0;
        for (std::size_t j = 0; j < radial.size(); ++j) {
            const double rho = radial.nodes[j];
            sum += radial.weights[j] * pair_difference(u, d, rho * w).even / rho;
        }
        if (far) {
            require_far_reach(radial, *far);
            sum += far->delta * annulus_power_tail(r, s, radial.radius, 0.0);
        }
        res.value += rule.weights[i] * sum;
        res.radius = std::max(res.radius, radial.radius);
        res.capped = res.capped || radial.capped;
        res.nodes += radial.size();
    }
    res.capped = res.capped || tr.capped;
    res.tail_bound = far ? 0.0 : annulus_tail_bound(r, s, res.radius, decay);
    return res;
}

inline void require_grad_frac(const ScalarField& u, const Vec& x, double s, double p)
{
    require_point(u, x);
    require_upper_order(s);
    require_exponent(p);
    require(u.dimension() == 2 || u.dimension() == 3,
        "gradient-dependent operators require n in {2,3}; n = 1 has no admissible cap");
}

/// Evaluate f(xi) at the gradient direction, or resolve the variant by a
/// sphere search (at reduced resolution) followed by a full-resolution
/// evaluation at the optimizing direction(s).
template <class F>
double directional_variant(const PointData& d, int n, Variant variant, const QuadratureSpec& spec, F&& f)
{
    if (!d.critical)
        return f(d.direction, spec);
    const QuadratureSpec coarse = search_spec(spec);
    auto objective = [&](const Vec& xi) { return f(xi, coarse); };
    auto at = [&](Sense sense) {
        const SphereOptimum opt = optimize_on_sphere(objective, n, sense, true, spec.sphere_order);
        if (!opt.converged)
            throw NumericalError("direction search at a critical point did not converge");
        return f(opt.direction, spec);
    };
    switch (variant) {
    case Variant::plus:
        return at(Sense::maximize);
    case Variant::minus:
        return at(Sense::minimize);
    case Variant::automatic:
        break;
    }
    return 0.5 * (at(Sense::maximize) + at(Sense::minimize));
}

} // namespace detail

/// (1/alpha_p) int (2u(x) - u(x+y) - u(x-y)) |y|^{-n-2s} chi_[c_p,1](y/|y| . xi) dy
/// with xi = grad u/|grad u|; at critical points plus/minus take sup/inf over xi.
inline double grad_frac_p_laplacian(const ScalarField& u, const Vec& x, double s, double p,
    Variant variant = Variant::automatic, const QuadratureSpec& spec = {})
{
    detail::require_grad_frac(u, x, s, p);
    spec.validate();
    const CapKernel cap = CapKernel::make(u.dimension(), p);
    const PointData d = probe(u, x);
    return detail::directional_variant(d, u.dimension(), variant, spec, [&](const Vec& xi, const QuadratureSpec& q) {
        return 2.0 * detail::cap_operator_integral(u, d, s, cap, xi, q).value / cap.alpha;
    });
}

/// (C_{s,p} r^{2s}/2) int_{|y|>r} (u(x+y) + u(x-y)) |y|^{-n} (|y|^2-r^2)^{-s} chi dy.
/// At critical points plus/minus take sup/inf of the mean over xi.
inline double grad_frac_p_mean(const ScalarField& u, const Vec& x, double s, double p, double r,
    Variant variant = Variant::automatic, const QuadratureSpec& spec = {})
{
    detail::require_grad_frac(u, x, s, p);
    require_mean_radius(u, x, r);
    spec.validate();
    const CapKernel cap = CapKernel::make(u.dimension(), p);
    const double k = cap_mean_constant(s, cap) * std::pow(r, 2.0 * s);
    const PointData d = probe(u, x);
    return detail::directional_variant(d, u.dimension(), variant, spec, [&](const Vec& xi, const QuadratureSpec& q) {
        return d.value - k * detail::cap_mean_integral(u, d, s, r, cap, xi, q).value;
    });
}

/// C_{s,p} r^{2s} int_{|y|>r} |y|^{-n} (|y|^2-r^2)^{-s} chi dy by quadrature;
/// equals 1 for a correctly normalized kernel.
inline double grad_frac_kernel_mass(int n, double s, double p, double r, const QuadratureSpec& spec = {})
{
    require_upper_order(s);
    const CapKernel cap = CapKernel::make(n, p);
    Vec axis = Vec::Zero(n);
    axis(0) = 1.0;
    const SphereRule rule = cap_rule(n, axis, cap.threshold, spec.sphere_order);
    double angular = 0.0;
    for (double w : rule.weights)
        angular += w;
    const RadialRule radial = annulus_rule(r, s, 4.0 * r, spec);
    const double inner = radial.integrate([](double rho) { return 1.0 / rho; });
    const double tail = annulus_power_tail(r, s, radial.radius, 0.0);
    return cap_mean_constant(s, cap) * std::pow(r, 2.0 * s) * angular * (inner + tail);
}

/// u - M_r^{s,p} - (C_{s,p} alpha_p / 2) r^{2s} (-Delta)^s_p u. Away from
/// critical points in closed difference form (kernel difference on the
/// exterior minus the inner ball); at critical points the operator variant
/// is paired with the opposite mean variant.
inline double grad_frac_p_residual(const ScalarField& u, const Vec& x, double s, double p, double r,
    Variant variant = Variant::automatic, const QuadratureSpec& spec = {})
{
    detail::require_grad_frac(u, x, s, p);
    require_mean_radius(u, x, r);
    spec.validate();
    const CapKernel cap = CapKernel::make(u.dimension(), p);
    const double C = cap_mean_constant(s, cap);
    const double k = C * std::pow(r, 2.0 * s);
    const PointData d = probe(u, x);
    if (d.critical) {
        const double mean = grad_frac_p_mean(u, x, s, p, r, opposite(variant), spec);
        const double op = grad_frac_p_laplacian(u, x, s, p, variant, spec);
        return (d.value - mean) - 0.5 * C * cap.alpha * std::pow(r, 2.0 * s) * op;
    }
    const detail::RayBounds eg = detail::even_part_growth(u, d);
    const Decay decay{eg.bound * cap.mass, 1.0 - eg.exponent};
    const auto far = far_increment(u, d, 2.0 * r);
    const TruncationRadius tr = far ? TruncationRadius{far->radius, false} : annulus_truncation(r, s, decay, spec);
    auto outer = detail::directional_rules(u, x, [&](const std::vector<double>& bp) {
        return annulus_difference_rule(r, s, tr.radius, spec, bp, u.oscillation_length());
    });
    auto inner = detail::directional_rules(
        u, x, [&](const std::vector<double>& bp) { return power_rule(r, 1.0 - 2.0 * s, r, spec, bp); });
    const SphereRule rule = cap_rule(u.dimension(), d.direction, cap.threshold, spec.sphere_order);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Vec& w = rule.nodes[i];
        double radial = 0.0;
        const RadialRule& out = outer(w);
        for (std::size_t j = 0; j < out.size(); ++j)
            radial += out.weights[j] * pair_difference(u, d, out.nodes[j] * w).even / out.nodes[j];
        if (far) {
            require_far_reach(out, *far);
            radial += far->delta * annulus_power_tail(r, s, out.radius, 0.0, 1);
        }
        const RadialRule& in = inner(w);
        for (std::size_t j = 0; j < in.size(); ++j)
            radial -= in.weights[j] * pair_difference(u, d, in.nodes[j] * w).even / (in.nodes[j] * in.nodes[j]);
        sum += rule.weights[i] * radial;
    }
    return k * sum;
}

// ---------------------------------------------------------------------------
// Infinity fractional Laplacian

namespace detail {

inline std::vector<double> line_breakpoints(const ScalarField& u, const Vec& x, const Vec& w)
{
    auto bp = u.ray_breakpoints(x, w);
    const auto back = u.ray_breakpoints(x, Vec(-w));
    bp.insert(bp.end(), back.begin(), back.end());
    std::sort(bp.begin(), bp.end());
    return bp;
}

/// int_0^inf (u(x) - u(x + rho w)) rho^{-1-2s} drho at a critical point.
inline RayIntegralInfo one_sided_ray(const ScalarField& u, const PointData& d, double s, const Vec& w,
    const QuadratureSpec& spec)
{
    const Growth g = u.growth(d.x);
    const Growth hg{std::abs(d.value) + g.constant, g.coefficient, g.exponent};
    const double h2 = -0.5 * w.dot(d.hessian * w);
    auto h = [&](double rho) { return pair_difference(u, d, rho * w).plus(); };
    std::optional<RayFarValue> fv;
    if (const auto far = far_increment(u, d, 0.0))
        fv = RayFarValue{far->radius, far->delta};
    return ray_pv_integral_info(h, s, hg, spec, u.ray_breakpoints(d.x, w), d.eta, u.oscillation_length(), h2, fv);
}

/// c_s r^{2s} int_r^inf (u(x) - u(x + rho w)) (rho^2 - r^2)^{-s} rho^{-1} drho.
inline double one_sided_mean_deficit(const ScalarField& u, const PointData& d, double s, double r, const Vec& w,
    const QuadratureSpec& spec)
{
    const Growth g = u.growth(d.x);
    const Decay decay{std::abs(d.value) + g.constant + g.coefficient, 1.0 - g.exponent};
    const auto far = far_increment(u, d, 2.0 * r);
    const TruncationRadius tr = far ? TruncationRadius{far->radius, false} : annulus_truncation(r, s, decay, spec);
    const auto bp = u.ray_breakpoints(d.x, w);
    const RadialRule rule = annulus_rule(r, s, tr.radius, spec, bp, u.oscillation_length());
    double sum = rule.integrate([&](double rho) { return pair_difference(u, d, rho * w).plus() / rho; });
    if (far) {
        require_far_reach(rule, *far);
        sum += far->delta * annulus_power_tail(r, s, rule.radius, 0.0);
    }
    return ray_mean_constant(s) * std::pow(r, 2.0 * s) * sum;
}

} // namespace detail

/// int_0^inf (2u(x) - u(x + rho z) - u(x - rho z)) rho^{-1-2s} drho with z the
/// gradient direction. At critical points the sup over w of the inf over
/// zeta of the mixed ray integral; the integrand separates, so this is
/// sup_w g(w) + inf_w g(w) with g(w) = int (u(x) - u(x + rho w)) rho^{-1-2s}.
inline OperatorResult infinity_frac_laplacian_result(const ScalarField& u, const Vec& x, double s,
    const QuadratureSpec& spec = {})
{
    require_point(u, x);
    require_upper_order(s);
    spec.validate();
    const PointData d = probe(u, x);
    OperatorResult res;
    if (!d.critical) {
        const Vec& z = d.direction;
        const Growth g = u.growth(x);
        const Growth hg{2.0 * (std::abs(d.value) + g.constant), 2.0 * g.coefficient, g.exponent};
        const double h2 = -z.dot(d.hessian * z);
        auto h = [&](double rho) { return 2.0 * pair_difference(u, d, rho * z).even; };
        const auto bp = detail::line_breakpoints(u, x, z);
        std::optional<RayFarValue> fv;
        if (const auto far = far_increment(u, d, 0.0))
            fv = RayFarValue{far->radius, 2.0 * far->delta};
        const RayIntegralInfo info = ray_pv_integral_info(h, s, hg, spec, bp, d.eta, u.oscillation_length(), h2, fv);
        res.value = info.value;
        res.tail_bound = info.tail_bound + info.inner_bound;
        res.radius = info.radius;
        res.capped = info.capped;
        return res;
    }
    const QuadratureSpec coarse = detail::search_spec(spec);
    auto g = [&](const Vec& w) { return detail::one_sided_ray(u, d, s, w, coarse).value; };
    const SphereOptimum hi = optimize_on_sphere(g, u.dimension(), Sense::maximize, false, spec.sphere_order);
    const SphereOptimum lo = optimize_on_sphere(g, u.dimension(), Sense::minimize, false, spec.sphere_order);
    if (!hi.converged || !lo.converged) {
        std::ostringstream msg;
        msg << "minimax search did not converge (" << hi.evaluations + lo.evaluations
            << " ray evaluations on a grid of " << spec.sphere_order << ")";
        throw NumericalError(msg.str());
    }
    const RayIntegralInfo a = detail::one_sided_ray(u, d, s, hi.direction, spec);
    const RayIntegralInfo b = detail::one_sided_ray(u, d, s, lo.direction, spec);
    res.value = a.value + b.value;
    res.tail_bound = a.tail_bound + b.tail_bound + a.inner_bound + b.inner_bound;
    res.radius = std::max(a.radius, b.radius);
    res.capped = a.capped || b.capped;
    return res;
}

inline double infinity_frac_laplacian(const ScalarField& u, const Vec& x, double s, const QuadratureSpec& spec = {})
{
    return infinity_frac_laplacian_result(u, x, s, spec).value;
}

/// c_s r^{2s} int_r^inf (u(x + rho w) + u(x - rho zeta)) (rho^2-r^2)^{-s} rho^{-1} drho,
/// c_s = sin(pi s)/pi, with w = zeta = z away from critical points and the
/// separable sup-inf over (w, zeta) at critical points.
inline double infinity_frac_mean(const ScalarField& u, const Vec& x, double s, double r,
    const QuadratureSpec& spec = {})
{
    require_point(u, x);
    require_upper_order(s);
    require_mean_radius(u, x, r);
    spec.validate();
    const PointData d = probe(u, x);
    if (!d.critical) {
        return d.value - detail::one_sided_mean_deficit(u, d, s, r, d.direction, spec)
            - detail::one_sided_mean_deficit(u, d, s, r, Vec(-d.direction), spec);
    }
    const QuadratureSpec coarse = detail::search_spec(spec);
    auto deficit = [&](const Vec& w) { return detail::one_sided_mean_deficit(u, d, s, r, w, coarse); };
    const SphereOptimum hi = optimize_on_sphere(deficit, u.dimension(), Sense::maximize, false, spec.sphere_order);
    const SphereOptimum lo = optimize_on_sphere(deficit, u.dimension(), Sense::minimize, false, spec.sphere_order);
    return d.value - detail::one_sided_mean_deficit(u, d, s, r, hi.direction, spec)
        - detail::one_sided_mean_deficit(u, d, s, r, lo.direction, spec);
}

/// u - M^s_r u - c_s r^{2s} (-Delta)^s_inf u, in closed difference form away
/// from critical points.
inline double infinity_frac_residual(const ScalarField& u, const Vec& x, double s, double r,
    const QuadratureSpec& spec = {})
{
    require_point(u, x);
    require_upper_order(s);
    require_mean_radius(u, x, r);
    spec.validate();
    const PointData d = probe(u, x);
    const double cs = ray_mean_constant(s);
    if (d.critical) {
        return (d.value - infinity_frac_mean(u, x, s, r, spec))
            - cs * std::pow(r, 2.0 * s) * infinity_frac_laplacian(u, x, s, spec);
    }
    const Vec& z = d.direction;
    const Growth g = u.growth(x);
    const Decay decay{2.0 * (std::abs(d.value) + g.constant + g.coefficient), 1.0 - g.exponent};
    const auto far = far_increment(u, d, 2.0 * r);
    const TruncationRadius tr = far ? TruncationRadius{far->radius, false} : annulus_truncation(r, s, decay, spec);
    const auto bp = detail::line_breakpoints(u, x, z);
    const RadialRule outer = annulus_difference_rule(r, s, tr.radius, spec, bp, u.oscillation_length());
    const RadialRule inner = power_rule(r, 1.0 - 2.0 * s, r, spec, bp);
    auto h = [&](double rho) { return 2.0 * pair_difference(u, d, rho * z).even; };
    double out = outer.integrate([&](double rho) { return h(rho) / rho; });
    if (far) {
        require_far_reach(outer, *far);
        out += 2.0 * far->delta * annulus_power_tail(r, s, outer.radius, 0.0, 1);
    }
    const double in = inner.integrate([&](double rho) { return h(rho) / (rho * rho); });
    return cs * std::pow(r, 2.0 * s) * (out - in);
}

} // namespace fracmv

#endif // FRACMV_GRAD_FRAC_HPP
