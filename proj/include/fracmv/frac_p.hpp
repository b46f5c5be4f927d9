#ifndef FRACMV_FRAC_P_HPP
#define FRACMV_FRAC_P_HPP

#include "fracmv/constants.hpp"
#include "fracmv/core.hpp"
#include "fracmv/differences.hpp"
#include "fracmv/fields.hpp"
#include "fracmv/local_ops.hpp"
#include "fracmv/quadrature.hpp"
#include "fracmv/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace fracmv {

/// Evaluation parameters shared by the nonlocal operators.
struct OperatorParams {
    int n = 1;
    double s = 0.5;
    double p = 2.0;
    Vec x;
    double r = 0.0;  // kernel radius; 0 where the operator has none

    void validate(const ScalarField& u, bool needs_radius) const
    {
        require_dimension(n);
        require(u.dimension() == n, "field dimension does not match n");
        require_order(s);
        require_exponent(p);
        require_point(u, x);
        if (needs_radius)
            require_mean_radius(u, x, r);
    }
};

/// A value with the bookkeeping of its quadrature.
struct OperatorResult {
    double value = 0.0;
    double tail_bound = 0.0;  // analytic bound on the discarded far field
    double radius = 0.0;      // truncation radius
    bool capped = false;      // truncation radius limited by the cap or node budget
    std::size_t nodes = 0;
};

namespace detail {

/// |u(x) - u(x+y)| <= bound * |y|^exponent for |y| >= 1.
struct DifferenceGrowth {
    double bound;
    double exponent;
};

inline DifferenceGrowth difference_growth(const ScalarField& u, const PointData& d)
{
    const Growth g = u.growth(d.x);
    return {std::abs(d.value) + g.constant + g.coefficient, g.exponent};
}

/// Radial rule per direction: the shared rule unless the field reports a
/// breakpoint on the line through x along +-w.
template <class Build>
class DirectionalRules {
public:
    DirectionalRules(const ScalarField& u, const Vec& x, Build build)
        : u_(u)
        , x_(x)
        , build_(std::move(build))
        , shared_(build_(std::vector<double>{}))
    {
    }

    const RadialRule& operator()(const Vec& w)
    {
        auto bp = u_.ray_breakpoints(x_, w);
        const auto back = u_.ray_breakpoints(x_, Vec(-w));
        bp.insert(bp.end(), back.begin(), back.end());
        if (bp.empty())
            return shared_;
        std::sort(bp.begin(), bp.end());
        special_ = build_(bp);
        return special_;
    }

    const RadialRule& shared() const { return shared_; }

private:
    const ScalarField& u_;
    Vec x_;
    Build build_;
    RadialRule shared_;
    RadialRule special_;
};

template <class Build>
DirectionalRules<Build> directional_rules(const ScalarField& u, const Vec& x, Build build)
{
    return DirectionalRules<Build>(u, x, std::move(build));
}

inline void check_self_convergence(const char* what, double coarse, double fine, const QuadratureSpec& spec)
{
    const double gap = std::abs(coarse - fine);
    if (gap > 10.0 * spec.truncation_tol + 1e-8 * std::abs(fine)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": quadrature self-convergence failure, base resolution " << coarse << " vs doubled "
            << fine << " (discrepancy " << gap << ")";
        throw NumericalError(msg.str());
    }
}

} // namespace detail

/// int phi(u(x) - u(x+y)) |y|^{-n-sp} dy, phi(t) = |t|^{p-2} t (no
/// normalizing constant), evaluated as half the integral of the symmetrized
/// sum phi(u(x)-u(x+y)) + phi(u(x)-u(x-y)), which is O(|y|^p) at the origin
/// and needs no principal value. Near field (0, rho0] by Gauss-Jacobi with
/// weight rho^{p(1-s)-1}, rho0 = min(r, eta/4).
inline OperatorResult frac_p_laplacian_result(const ScalarField& u, const OperatorParams& params,
    const QuadratureSpec& spec = {})
{
    params.validate(u, false);
    spec.validate();
    const double s = params.s, p = params.p;
    const int n = params.n;
    const PointData d = probe(u, params.x);
    const double rho0 = params.r > 0.0 ? std::min(params.r, 0.25 * d.eta) : 0.25 * d.eta;

    // far field: |sum phi| <= 2 C^{p-1} rho^{g(p-1)}, or exactly 2 phi(delta)
    // beyond the radius where the field turns constant
    const auto far = far_increment(u, d, std::max(2.0 * rho0, 1.0));
    const auto dg = detail::difference_growth(u, d);
    const double kappa = s * p - dg.exponent * (p - 1.0);
    if (!far && !(kappa > 0.0))
        throw NumericalError("fractional p-Laplacian tail diverges: field growth exponent too large for s p");
    const double area = special::sphere_area(n);
    const double sup = area * std::pow(dg.bound, p - 1.0);
    TruncationRadius tr;
    if (far)
        tr.radius = far->radius;
    else
        tr = truncation_radius(spec.truncation_tol, sup, kappa, spec.max_radius_cap);
    const double radius = std::max({tr.radius, 2.0 * rho0, 1.0});
    const double b = p * (1.0 - s) - 1.0;

    auto rules = detail::directional_rules(u, params.x, [&](const std::vector<double>& bp) {
        return power_rule(rho0, b, radius, spec, bp, u.oscillation_length());
    });
    // a ridge field never turns constant: its truncated ray integrals peak
    // sharply across the wave vector's normal, so grade there as well
    const std::vector<double> ridge = far ? std::vector<double>{} : ridge_angles(u);
    const SphereRule half = power_sphere_rule(
        n, p, spec, true,
        [&] {
            auto angles = origin_singular_angles(d);
            angles.insert(angles.end(), ridge.begin(), ridge.end());
            return angles;
        },
        !ridge.empty());
    OperatorResult res;
    double sum = 0.0;
    for (std::size_t i = 0; i < half.size(); ++i) {
        const Vec& w = half.nodes[i];
        const RadialRule& rule = rules(w);
        double radial = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const double rho = rule.nodes[j];
            const PairDifference pd = pair_difference(u, d, rho * w);
            radial += rule.weights[j] * symmetric_power_sum(pd.odd, pd.even, p) / std::pow(rho, p);
        }
        if (far) {
            require_far_reach(rule, *far);
            radial += symmetric_power_sum(0.0, far->delta, p) * std::pow(rule.radius, -s * p) / (s * p);
        } else if (p == 2.0) {
            // linear case: the 2 u(x) part of the discarded integrand is exact;
            // only the u(x+y) + u(x-y) part remains under the tail bound
            radial += 2.0 * d.value * std::pow(rule.radius, -2.0 * s) / (2.0 * s);
        }
        sum += 0.5 * half.weights[i] * radial;
        res.nodes += rule.size();
        res.capped = res.capped || rule.capped;
        res.radius = std::max(res.radius, rule.radius);
    }
    res.value = sum;
    res.capped = res.capped || tr.capped;
    res.tail_bound = far ? 0.0 : sup * std::pow(res.radius, -kappa) / kappa;
    if (spec.self_check) {
        const OperatorResult fine = frac_p_laplacian_result(u, params, spec.refined());
        detail::check_self_convergence("frac_p_laplacian", res.value, fine.value, spec);
    }
    return res;
}

inline double frac_p_laplacian(const ScalarField& u, const OperatorParams& params, const QuadratureSpec& spec = {})
{
    return frac_p_laplacian_result(u, params, spec).value;
}

/// The exterior integrals of the (s,p)-kernel on {|y| > r}:
/// weight    = int (|u(x)-u(x-y)|/|y|^s)^{p-2} |y|^{-n} (|y|^2-r^2)^{-s} dy,
/// deviation = int (same weight) (u(x) - u(x-y)) |y|^{-n} (|y|^2-r^2)^{-s} dy,
/// both from one sphere x annulus pass with antipodal symmetrization.
struct ExteriorParts {
    double weight = 0.0;
    double deviation = 0.0;
    double tail_bound = 0.0;
    double radius = 0.0;
    bool capped = false;
};

inline ExteriorParts exterior_parts(const ScalarField& u, const OperatorParams& params, const QuadratureSpec& spec = {})
{
    params.validate(u, true);
    spec.validate();
    const double s = params.s, p = params.p, r = params.r;
    const int n = params.n;
    const PointData d = probe(u, params.x);
    const auto dg = detail::difference_growth(u, d);
    const double area = special::sphere_area(n);
    // g_weight <= C^{p-2} rho^{(g-s)(p-2)-1}, g_dev <= C^{p-1} rho^{(g-s)(p-2)+g-1}
    const double weight_exp = 1.0 + (s - dg.exponent) * (p - 2.0);
    const Decay weight_decay{area * std::pow(dg.bound, p - 2.0), weight_exp};
    const Decay dev_decay{area * std::pow(dg.bound, p - 1.0), weight_exp - dg.exponent};
    const Decay worst{std::max(weight_decay.constant, dev_decay.constant),
        std::min(weight_decay.exponent, dev_decay.exponent)};
    const auto far = far_increment(u, d, 2.0 * r);
    const TruncationRadius tr = far ? TruncationRadius{far->radius, false} : annulus_truncation(r, s, worst, spec);

    auto rules = detail::directional_rules(u, params.x, [&](const std::vector<double>& bp) {
        return annulus_rule(r, s, tr.radius, spec, bp, u.oscillation_length());
    });
    const SphereRule half
        = power_sphere_rule(n, p, spec, true, [&] { return level_crossing_angles(u, params.x, r); });
    ExteriorParts parts;
    for (std::size_t i = 0; i < half.size(); ++i) {
        const Vec& w = half.nodes[i];
        const RadialRule& rule = rules(w);
        double wsum = 0.0, dsum = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const double rho = rule.nodes[j];
            const PairDifference pd = pair_difference(u, d, rho * w);
            const double scale = rule.weights[j] * std::pow(rho, -s * (p - 2.0) - 1.0);
            wsum += scale * symmetric_weight_sum(pd.odd, pd.even, p);
            dsum += scale * symmetric_power_sum(pd.odd, pd.even, p);
        }
        if (far) {
            require_far_reach(rule, *far);
            const double tail = annulus_power_tail(r, s, rule.radius, s * (p - 2.0));
            wsum += tail * symmetric_weight_sum(0.0, far->delta, p);
            dsum += tail * symmetric_power_sum(0.0, far->delta, p);
        }
        parts.weight += 0.5 * half.weights[i] * wsum;
        parts.deviation += 0.5 * half.weights[i] * dsum;
        parts.radius = std::max(parts.radius, rule.radius);
        parts.capped = parts.capped || rule.capped;
    }
    parts.capped = parts.capped || tr.capped;
    if (!far)
        parts.tail_bound = std::max(annulus_tail_bound(r, s, parts.radius, weight_decay),
            annulus_tail_bound(r, s, parts.radius, dev_decay));
    if (spec.self_check) {
        const ExteriorParts fine = exterior_parts(u, params, spec.refined());
        detail::check_self_convergence("d_rsp", parts.weight, fine.weight, spec);
        detail::check_self_convergence("deviation integral", parts.deviation, fine.deviation, spec);
    }
    return parts;
}

/// The normalizing weight integral of the (s,p)-mean kernel.
inline double d_rsp(const ScalarField& u, const OperatorParams& params, const QuadratureSpec& spec = {})
{
    return exterior_parts(u, params, spec).weight;
}

/// The (s,p)-mean u(x) - deviation / weight (difference form, exact under
/// u -> u + c).
inline double m_rsp(const ScalarField& u, const OperatorParams& params, const QuadratureSpec& spec = {})
{
    const ExteriorParts parts = exterior_parts(u, params, spec);
    if (!(parts.weight >= degenerate_weight))
        throw DomainError("(s,p)-mean weight integral vanishes (field constant on the exterior)");
    return u.value(params.x) - parts.deviation / parts.weight;
}

/// The same mean as the ratio int W u(x-y) K / int W K, without the
/// difference form; kept as an independent second implementation.
inline double m_rsp_ratio(const ScalarField& u, const OperatorParams& params, const QuadratureSpec& spec = {})
{
    params.validate(u, true);
    const double s = params.s, p = params.p, r = params.r;
    const PointData d = probe(u, params.x);
    const auto dg = detail::difference_growth(u, d);
    const double area = special::sphere_area(params.n);
    const double weight_exp = 1.0 + (s - dg.exponent) * (p - 2.0);
    const Growth g = u.growth(params.x);
    const Decay decay{area * std::pow(dg.bound, p - 2.0) * (g.constant + g.coefficient),
        weight_exp - g.exponent};
    const auto far = far_increment(u, d, 2.0 * r);
    const TruncationRadius tr = far ? TruncationRadius{far->radius, false} : annulus_truncation(r, s, decay, spec);
    const RadialRule rule = annulus_rule(r, s, tr.radius, spec, {}, u.oscillation_length());
    const SphereRule sphere = power_sphere_rule(params.n, p, spec, false, [&] {
        auto angles = level_crossing_angles(u, params.x, r);
        const std::size_t m = angles.size();
        for (std::size_t k = 0; k < m; ++k)
            angles.push_back(angles[k] + pi);  // u(x - r w) = u(x)
        return angles;
    });
    double num = 0.0, den = 0.0;
    if (far) {
        require_far_reach(rule, *far);
        const double total = std::accumulate(sphere.weights.begin(), sphere.weights.end(), 0.0);
        const double tail = total * abs_power(far->delta, p - 2.0) * annulus_power_tail(r, s, rule.radius, s * (p - 2.0));
        num += tail * far->level;
        den += tail;
    }
    for (std::size_t i = 0; i < sphere.size(); ++i) {
        const Vec& w = sphere.nodes[i];
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const double rho = rule.nodes[j];
            const double um = u.value(params.x - rho * w);
            const double wt = sphere.weights[i] * rule.weights[j] * abs_power(d.value - um, p - 2.0)
                * std::pow(rho, -s * (p - 2.0) - 1.0);
            num += wt * um;
            den += wt;
        }
    }
    if (!(den >= degenerate_weight))
        throw DomainError("(s,p)-mean weight integral vanishes (field constant on the exterior)");
    return num / den;
}

/// The linear fractional mean c(n,s) r^{2s} int_{|y|>r} u(x-y) (|y|^2-r^2)^{-s} |y|^{-n} dy.
inline double linear_fractional_mean(const ScalarField& u, const Vec& x, double s, double r,
    const QuadratureSpec& spec = {})
{
    require_point(u, x);
    require_order(s);
    require(r > 0.0, "radius r must be positive");
    const int n = u.dimension();
    const Growth g = u.growth(x);
    const Decay decay{special::sphere_area(n) * (g.constant + g.coefficient), 1.0 - g.exponent};
    const auto far = u.far_field(x);
    const TruncationRadius tr
        = far ? TruncationRadius{std::max(far->radius, 2.0 * r), false} : annulus_truncation(r, s, decay, spec);
    const RadialRule rule = annulus_rule(r, s, tr.radius, spec, {}, u.oscillation_length());
    const SphereRule sphere = sphere_rule(n, spec.sphere_order);
    double sum = 0.0;
    if (far) {
        if (rule.radius < far->radius)
            throw NumericalError("node budget stops the radial rule short of the far-field radius");
        const double total = std::accumulate(sphere.weights.begin(), sphere.weights.end(), 0.0);
        sum += total * far->level * annulus_power_tail(r, s, rule.radius, 0.0);
    }
    for (std::size_t i = 0; i < sphere.size(); ++i)
        for (std::size_t j = 0; j < rule.size(); ++j)
            sum += sphere.weights[i] * rule.weights[j] * u.value(x - rule.nodes[j] * sphere.nodes[i]) / rule.nodes[j];
    return mean_kernel_constant(n, s) * std::pow(r, 2.0 * s) * sum;
}

/// Rule for int_r^R g(rho) [(rho^2-r^2)^{-s} - rho^{-2s}] drho: Gauss-Jacobi for
/// the singular part on (r, 2r] minus Gauss-Legendre for rho^{-2s} there,
/// and the kernel difference in expm1/log1p form beyond 2r.
inline RadialRule annulus_difference_rule(double r, double s, double radius, const QuadratureSpec& spec,
    std::span<const double> breakpoints = {},
    double oscillation_length = std::numeric_limits<double>::infinity())
{
    RadialRule rule = annulus_rule(r, s, radius, spec, breakpoints, oscillation_length);
    const std::size_t singular = static_cast<std::size_t>(spec.jacobi_nodes);
    for (std::size_t i = singular; i < rule.size(); ++i) {
        const double rho = rule.nodes[i];
        const double x = (r / rho) * (r / rho);
        // rho^{-2s} [(1 - x)^{-s} - 1] relative to (rho^2 - r^2)^{-s} = rho^{-2s} (1-x)^{-s}
        rule.weights[i] *= -std::expm1(s * std::log1p(-x));
    }
    std::vector<double> x, w;
    detail::append_legendre(r, 2.0 * r, spec.jacobi_nodes, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
        rule.nodes.push_back(x[i]);
        rule.weights.push_back(-w[i] * std::pow(x[i], -2.0 * s));
    }
    return rule;
}

/// weight * (u(x) - m_rsp) - frac_p_laplacian, in closed difference form:
/// the exterior integral against (|y|^2-r^2)^{-s} - |y|^{-2s} minus the
/// inner-ball part of the fractional p-Laplacian.
inline OperatorResult frac_p_residual_result(const ScalarField& u, const OperatorParams& params,
    const QuadratureSpec& spec = {})
{
    params.validate(u, true);
    spec.validate();
    const double s = params.s, p = params.p, r = params.r;
    const int n = params.n;
    const PointData d = probe(u, params.x);
    const auto dg = detail::difference_growth(u, d);
    const double area = special::sphere_area(n);
    const Decay dev_decay{area * std::pow(dg.bound, p - 1.0), 1.0 + (s - dg.exponent) * (p - 2.0) - dg.exponent};
    const auto far = far_increment(u, d, 2.0 * r);
    const TruncationRadius tr = far ? TruncationRadius{far->radius, false} : annulus_truncation(r, s, dev_decay, spec);

    auto outer = detail::directional_rules(u, params.x, [&](const std::vector<double>& bp) {
        return annulus_difference_rule(r, s, tr.radius, spec, bp, u.oscillation_length());
    });
    const double b = p * (1.0 - s) - 1.0;
    auto inner = detail::directional_rules(
        u, params.x, [&](const std::vector<double>& bp) { return power_rule(r, b, r, spec, bp); });
    const SphereRule half = power_sphere_rule(n, p, spec, true, [&] {
        auto angles = level_crossing_angles(u, params.x, r);
        for (double a : origin_singular_angles(d))
            angles.push_back(a);
        return angles;
    });
    OperatorResult res;
    double sum = 0.0;
    for (std::size_t i = 0; i < half.size(); ++i) {
        const Vec& w = half.nodes[i];
        const RadialRule& out = outer(w);
        double radial = 0.0;
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double rho = out.nodes[j];
            const PairDifference pd = pair_difference(u, d, rho * w);
            radial += out.weights[j] * std::pow(rho, -s * (p - 2.0) - 1.0) * symmetric_power_sum(pd.odd, pd.even, p);
        }
        if (far) {
            require_far_reach(out, *far);
            radial += annulus_power_tail(r, s, out.radius, s * (p - 2.0), 1) * symmetric_power_sum(0.0, far->delta, p);
        }
        const RadialRule& in = inner(w);
        for (std::size_t j = 0; j < in.size(); ++j) {
            const double rho = in.nodes[j];
            const PairDifference pd = pair_difference(u, d, rho * w);
            radial -= in.weights[j] * symmetric_power_sum(pd.odd, pd.even, p) / std::pow(rho, p);
        }
        sum += 0.5 * half.weights[i] * radial;
        res.nodes += out.size() + in.size();
        res.radius = std::max(res.radius, out.radius);
        res.capped = res.capped || out.capped;
    }
    res.value = sum;
    res.capped = res.capped || tr.capped;
    // kernel difference <= s (4/3)^{1+s} r^2 rho^{-2-2s} beyond 2r
    const double e = dev_decay.exponent + 1.0 + 2.0 * s;
    res.tail_bound = far ? 0.0 : dev_decay.constant * s * std::pow(4.0 / 3.0, 1.0 + s) * r * r * std::pow(res.radius, -e) / e;
    if (spec.self_check) {
        const OperatorResult fine = frac_p_residual_result(u, params, spec.refined());
        detail::check_self_convergence("frac_p_residual", res.value, fine.value, spec);
    }
    return res;
}

inline double frac_p_residual(const ScalarField& u, const OperatorParams& params, const QuadratureSpec& spec = {})
{
    return frac_p_residual_result(u, params, spec).value;
}

} // namespace fracmv

#endif // FRACMV_FRAC_P_HPP
