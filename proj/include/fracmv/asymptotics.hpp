#ifndef FRACMV_ASYMPTOTICS_HPP
#define FRACMV_ASYMPTOTICS_HPP

#include "fracmv/constants.hpp"
#include "fracmv/core.hpp"
#include "fracmv/fields.hpp"
#include "fracmv/frac_p.hpp"
#include "fracmv/grad_frac.hpp"
#include "fracmv/local_ops.hpp"
#include "fracmv/quadrature.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace fracmv {

inline constexpr double saturation_floor = 1e-14;

struct SlopeFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double ci = std::numeric_limits<double>::quiet_NaN();  // 95% half-width
    std::size_t used = 0;
};

/// Least-squares fit of log|y| against log x over [first, last), skipping
/// entries below the saturation floor. The half-width uses the Student t
/// quantile with used - 2 degrees of freedom.
inline SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t first,
    std::size_t last)
{
    std::vector<double> lx, ly;
    for (std::size_t i = first; i < last && i < x.size(); ++i) {
        const double v = std::abs(y[i]);
        if (v >= saturation_floor && x[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(v));
        }
    }
    SlopeFit fit;
    fit.used = lx.size();
    if (lx.size() < 2)
        return fit;
    const double m = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (lx.size() > 2) {
        double sse = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double e = ly[i] - fit.intercept - fit.slope * lx[i];
            sse += e * e;
        }
        const double dof = m - 2.0;
        const double se = std::sqrt(sse / dof / sxx);
        boost::math::students_t dist(dof);
        fit.ci = boost::math::quantile(dist, 0.975) * se;
    } else {
        fit.ci = std::numeric_limits<double>::infinity();
    }
    return fit;
}

struct ExpansionReport {
    std::string label;
    std::vector<double> abscissae;
    std::vector<double> residuals;
    double fitted_slope = std::numeric_limits<double>::quiet_NaN();
    double slope_ci = std::numeric_limits<double>::quiet_NaN();
    double expected_slope = 0.0;
    double tolerance = 0.0;
    bool one_sided = false;  // pass iff slope >= expected - tolerance
    std::pair<std::size_t, std::size_t> window{0, 0};
    bool saturated = false;
    bool faster = false;     // one-sided pass with slope above expected + tolerance
    bool pass = false;
    QuadratureSpec spec;
};

/// Fit and judge a residual sequence. The window drops the first and last
/// octave when at least six points are available.
inline ExpansionReport judge_expansion(std::string label, std::vector<double> abscissae, std::vector<double> residuals,
    double expected, double tolerance, bool one_sided, const QuadratureSpec& spec = {})
{
    require(abscissae.size() == residuals.size(), "abscissae and residuals must have equal length");
    require(abscissae.size() >= 3, "expansion fit needs at least 3 points");
    for (std::size_t i = 1; i < abscissae.size(); ++i)
        require((abscissae[i] - abscissae[i - 1]) * (abscissae[1] - abscissae[0]) > 0.0,
            "abscissae must be strictly monotone");
    ExpansionReport rep;
    rep.label = std::move(label);
    rep.abscissae = std::move(abscissae);
    rep.residuals = std::move(residuals);
    rep.expected_slope = expected;
    rep.tolerance = tolerance;
    rep.one_sided = one_sided;
    rep.spec = spec;
    const std::size_t m = rep.abscissae.size();
    rep.window = m >= 6 ? std::pair<std::size_t, std::size_t>{1, m - 1} : std::pair<std::size_t, std::size_t>{0, m};
    bool all_small = true;
    for (double v : rep.residuals)
        all_small = all_small && std::abs(v) < saturation_floor;
    if (all_small) {
        rep.saturated = true;
        rep.pass = true;
        return rep;
    }
    const SlopeFit fit = fit_log_slope(rep.abscissae, rep.residuals, rep.window.first, rep.window.second);
    rep.fitted_slope = fit.slope;
    rep.slope_ci = fit.ci;
    if (fit.used < 2) {
        rep.saturated = true;
        rep.pass = true;
        return rep;
    }
    if (one_sided) {
        rep.pass = rep.fitted_slope >= expected - tolerance;
        rep.faster = rep.fitted_slope > expected + tolerance;
    } else {
        rep.pass = std::abs(rep.fitted_slope - expected) <= tolerance;
    }
    return rep;
}

/// Residuals whose decay in r the sweep measures.
enum class ResidualKind {
    frac_p,             // D(u - M) - (-Delta)^s_p u                  ~ r^{2-2s}
    grad_frac_p,        // u - M - (C alpha/2) r^{2s} (-Delta)^s_p u   ~ r^2
    infinity_frac,      // u - M - c_s r^{2s} (-Delta)^s_inf u         ~ r^2
    local_p_mean,       // int |u(x)-u(x-rw)|^{p-2}(u(x)-u(x-rw)) dw  ~ r^p
    local_grad_p_mean,  // u - M_r^p                                   ~ r^2
    local_infinity_mean // u - M_r^inf                                 ~ r^2
};

inline const char* to_string(ResidualKind k)
{
    switch (k) {
    case ResidualKind::frac_p:
        return "fp-residual";
    case ResidualKind::grad_frac_p:
        return "gfp-residual";
    case ResidualKind::infinity_frac:
        return "inf-residual";
    case ResidualKind::local_p_mean:
        return "pmean-residual";
    case ResidualKind::local_grad_p_mean:
        return "gpmean-residual";
    case ResidualKind::local_infinity_mean:
        return "infmean-residual";
    }
    return "residual";
}

struct SweepOptions {
    double s = 0.5;
    double p = 2.0;
    Variant variant = Variant::automatic;
    QuadratureSpec spec;
    double tolerance = std::numeric_limits<double>::quiet_NaN();  // NaN: default per kind
};

struct ExpectedOrder {
    double slope;
    double tolerance;
    bool one_sided;
};

inline ExpectedOrder expected_order(ResidualKind kind, const SweepOptions& opts)
{
    switch (kind) {
    case ResidualKind::frac_p:
        return {2.0 - 2.0 * opts.s, 0.3, true};
    case ResidualKind::grad_frac_p:
    case ResidualKind::infinity_frac:
        return {2.0, 0.3, true};
    case ResidualKind::local_p_mean:
        return {opts.p, 0.4, false};
    case ResidualKind::local_grad_p_mean:
    case ResidualKind::local_infinity_mean:
        return {2.0, 0.2, false};
    }
    return {0.0, 0.0, false};
}

/// Single residual evaluation at radius r.
inline double expansion_residual(ResidualKind kind, const ScalarField& u, const Vec& x, double r,
    const SweepOptions& opts)
{
    switch (kind) {
    case ResidualKind::frac_p: {
        OperatorParams params{u.dimension(), opts.s, opts.p, x, r};
        return frac_p_residual(u, params, opts.spec);
    }
    case ResidualKind::grad_frac_p:
        return grad_frac_p_residual(u, x, opts.s, opts.p, r, opts.variant, opts.spec);
    case ResidualKind::infinity_frac:
        return infinity_frac_residual(u, x, opts.s, r, opts.spec);
    case ResidualKind::local_p_mean:
        return local_p_mean_parts(u, x, r, opts.p, opts.spec).deviation;
    case ResidualKind::local_grad_p_mean:
        return u.value(x) - local_grad_p_mean(u, x, r, opts.p, opts.variant, opts.spec);
    case ResidualKind::local_infinity_mean:
        return u.value(x) - local_infinity_mean(u, x, r, opts.variant, opts.spec);
    }
    return 0.0;
}

/// r_k = r0 2^{-k}, k = 0..count-1, r0 = smooth_radius(x)/8.
inline std::vector<double> default_r_grid(const ScalarField& u, const Vec& x, int count = 8)
{
    const double r0 = u.smooth_radius(x) / 8.0;
    std::vector<double> grid;
    for (int k = 0; k < count; ++k)
        grid.push_back(std::ldexp(r0, -k));
    return grid;
}

/// Evaluate |residual| on r_grid and fit its order.
inline ExpansionReport r_sweep(ResidualKind kind, const ScalarField& u, const Vec& x, const SweepOptions& opts,
    std::vector<double> r_grid = {})
{
    if (r_grid.empty())
        r_grid = default_r_grid(u, x);
    require(r_grid.size() >= 6, "r-sweep needs at least 6 radii");
    const ExpectedOrder order = expected_order(kind, opts);
    const double tol = std::isnan(opts.tolerance) ? order.tolerance : opts.tolerance;
    std::vector<double> res;
    for (double r : r_grid)
        res.push_back(std::abs(expansion_residual(kind, u, x, r, opts)));
    return judge_expansion(to_string(kind), std::move(r_grid), std::move(res), order.slope, tol, order.one_sided,
        opts.spec);
}

/// Sweep of an arbitrary residual callback.
inline ExpansionReport r_sweep(const std::string& label, const std::function<double(double)>& residual,
    std::vector<double> r_grid, double expected, double tolerance, bool one_sided = false)
{
    std::vector<double> res;
    for (double r : r_grid)
        res.push_back(std::abs(residual(r)));
    return judge_expansion(label, std::move(r_grid), std::move(res), expected, tolerance, one_sided);
}

// ---------------------------------------------------------------------------
// s -> 1 limits

enum class LimitKind {
    frac_p,            // (1-s) frac_p_laplacian      -> -(gamma_p (p-1)/(2p)) Delta_p u
    d_rsp,             // (1-s) d_rsp                 -> (1/(2 r^p)) int |u(x)-u(x-rw)|^{p-2} dw
    m_rsp,             // m_rsp                       -> local_p_mean
    grad_frac_p,       // (1-s) grad_frac_p_laplacian -> -normalized_p_laplacian (opposite variant)
    grad_frac_p_mean,  // grad_frac_p_mean            -> local_grad_p_mean
    infinity_frac,     // (1-s) infinity_frac         -> -Delta_inf u / 2
    infinity_frac_mean // infinity_frac_mean          -> local_infinity_mean
};

inline const char* to_string(LimitKind k)
{
    switch (k) {
    case LimitKind::frac_p:
        return "fplap";
    case LimitKind::d_rsp:
        return "Drsp";
    case LimitKind::m_rsp:
        return "Mrsp";
    case LimitKind::grad_frac_p:
        return "gfplap";
    case LimitKind::grad_frac_p_mean:
        return "gfpmean";
    case LimitKind::infinity_frac:
        return "inffrac";
    case LimitKind::infinity_frac_mean:
        return "inffracmean";
    }
    return "limit";
}

struct LimitOptions {
    double p = 2.0;
    double r = 0.1;
    Variant variant = Variant::automatic;
    QuadratureSpec spec;
    double tolerance = std::numeric_limits<double>::quiet_NaN();  // NaN: default per kind
};

struct LimitReport {
    std::string label;
    std::vector<double> s_values;
    std::vector<double> values;           // scaled by (1-s) where the limit needs it
    std::vector<double> relative_errors;  // against target
    double target = 0.0;
    double extrapolated = std::numeric_limits<double>::quiet_NaN();
    double extrapolated_error = std::numeric_limits<double>::quiet_NaN();
    double tolerance = 0.0;
    bool scaled = false;
    bool pass = false;
    QuadratureSpec spec;
};

inline double default_limit_tolerance(LimitKind k)
{
    switch (k) {
    case LimitKind::frac_p:
    case LimitKind::grad_frac_p:
    case LimitKind::infinity_frac:
        return 0.05;
    default:
        return 0.02;
    }
}

inline bool limit_is_scaled(LimitKind k)
{
    return k == LimitKind::frac_p || k == LimitKind::d_rsp || k == LimitKind::grad_frac_p
        || k == LimitKind::infinity_frac;
}

/// The local object the family approaches as s -> 1.
inline double limit_target(LimitKind kind, const ScalarField& u, const Vec& x, const LimitOptions& opts)
{
    const int n = u.dimension();
    const double p = opts.p;
    switch (kind) {
    case LimitKind::frac_p:
        return -directional_moments(n, p).gamma_p * (p - 1.0) / (2.0 * p) * p_laplacian(u, x, p);
    case LimitKind::d_rsp: {
        const SphereRule rule = sphere_rule(n, opts.spec.sphere_order);
        const double ux = u.value(x);
        const double sum = rule.integrate(
            [&](const Vec& w) { return abs_power(ux - u.value(x - opts.r * w), p - 2.0); });
        return sum / (2.0 * std::pow(opts.r, p));
    }
    case LimitKind::m_rsp:
        return local_p_mean(u, x, opts.r, p, opts.spec);
    case LimitKind::grad_frac_p:
        return -normalized_p_laplacian(u, x, p, opposite(opts.variant));
    case LimitKind::grad_frac_p_mean:
        return local_grad_p_mean(u, x, opts.r, p, opts.variant, opts.spec);
    case LimitKind::infinity_frac:
        return -0.5 * infinity_laplacian(u, x, opts.variant);
    case LimitKind::infinity_frac_mean:
        return local_infinity_mean(u, x, opts.r, opts.variant, opts.spec);
    }
    return 0.0;
}

inline double limit_value(LimitKind kind, const ScalarField& u, const Vec& x, double s, const LimitOptions& opts)
{
    const OperatorParams params{u.dimension(), s, opts.p, x, opts.r};
    switch (kind) {
    case LimitKind::frac_p:
        return (1.0 - s) * frac_p_laplacian(u, OperatorParams{u.dimension(), s, opts.p, x, 0.0}, opts.spec);
    case LimitKind::d_rsp:
        return (1.0 - s) * d_rsp(u, params, opts.spec);
    case LimitKind::m_rsp:
        return m_rsp(u, params, opts.spec);
    case LimitKind::grad_frac_p:
        return (1.0 - s) * grad_frac_p_laplacian(u, x, s, opts.p, opts.variant, opts.spec);
    case LimitKind::grad_frac_p_mean:
        return grad_frac_p_mean(u, x, s, opts.p, opts.r, opts.variant, opts.spec);
    case LimitKind::infinity_frac:
        return (1.0 - s) * infinity_frac_laplacian(u, x, s, opts.spec);
    case LimitKind::infinity_frac_mean:
        return infinity_frac_mean(u, x, s, opts.r, opts.spec);
    }
    return 0.0;
}

/// L from value(s) = L + a (1-s) + b (1-s)^2 through the three largest s.
inline double richardson_limit(const std::vector<double>& s_values, const std::vector<double>& values)
{
    const std::size_t m = s_values.size();
    if (m < 3)
        return std::numeric_limits<double>::quiet_NaN();
    // indices of the three largest s
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s_values[a] > s_values[b]; });
    Eigen::Matrix3d A;
    Eigen::Vector3d rhs;
    for (int k = 0; k < 3; ++k) {
        const double h = 1.0 - s_values[idx[k]];
        A(k, 0) = 1.0;
        A(k, 1) = h;
        A(k, 2) = h * h;
        rhs(k) = values[idx[k]];
    }
    return A.colPivHouseholderQr().solve(rhs)(0);
}

/// Tabulate the family against its s -> 1 target. Pass is judged at the
/// largest s.
inline LimitReport s_sweep(LimitKind kind, const ScalarField& u, const Vec& x, const LimitOptions& opts,
    std::vector<double> s_grid = {0.9, 0.99, 0.999})
{
    require(!s_grid.empty(), "s-sweep needs at least one s");
    for (std::size_t i = 1; i < s_grid.size(); ++i)
        require(s_grid[i] > s_grid[i - 1], "s grid must be increasing");
    LimitReport rep;
    rep.label = to_string(kind);
    rep.s_values = s_grid;
    rep.scaled = limit_is_scaled(kind);
    rep.spec = opts.spec;
    rep.tolerance = std::isnan(opts.tolerance) ? default_limit_tolerance(kind) : opts.tolerance;
    rep.target = limit_target(kind, u, x, opts);
    const double denom = std::max(std::abs(rep.target), 1e-300);
    for (double s : s_grid) {
        const double v = limit_value(kind, u, x, s, opts);
        rep.values.push_back(v);
        rep.relative_errors.push_back(std::abs(v - rep.target) / denom);
    }
    rep.extrapolated = richardson_limit(rep.s_values, rep.values);
    if (!std::isnan(rep.extrapolated))
        rep.extrapolated_error = std::abs(rep.extrapolated - rep.target) / denom;
    rep.pass = rep.relative_errors.back() < rep.tolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// Appendix integrals

struct AppendixReport {
    double s = 0.0;
    std::vector<double> r_grid;
    // int_1^{1/r} t ((t^2-1)^{-s} - t^{-2s}) dt
    std::vector<double> bounded_values;
    std::vector<double> bounded_closed_form;
    double bounded_ratio = 0.0;  // max/min over the grid
    bool bounded_pass = false;
    // int_{1/r}^inf t^{-1} (t^{2s} (t^2-1)^{-s} - 1) dt, and its ratio to r^2
    std::vector<double> tail_values;
    std::vector<double> tail_ratios;
    double tail_target = 0.0;  // s/2
    double tail_error = 0.0;   // relative, at the smallest r
    double tail_slope = 0.0;
    bool tail_pass = false;
    // (1-s) int_{1+r}^inf dt / (t (t^2-1)^s) at the session's s
    std::vector<double> scaled_values;
    bool scaled_pass = false;
    bool pass = false;
};

/// [r^{2s-2} ((1-r^2)^{1-s} - 1) + 1] / (2(1-s)).
inline double bounded_integral_closed_form(double s, double r)
{
    const double e = 1.0 - s;
    return (std::pow(r, -2.0 * e) * std::expm1(e * std::log1p(-r * r)) + 1.0) / (2.0 * e);
}

inline double bounded_integral(double s, double r, const QuadratureSpec& spec = {})
{
    require_order(s);
    require(r > 0.0 && r < 0.5, "appendix radius must lie in (0, 1/2)");
    const RadialRule rule = annulus_difference_rule(1.0, s, 1.0 / r, spec);
    return rule.integrate([](double t) { return t; });
}

/// After v = 1/t: int_0^r v^{-1} ((1-v^2)^{-s} - 1) dv, a smooth integrand.
inline double tail_integral(double s, double r, const QuadratureSpec& spec = {})
{
    require_order(s);
    require(r > 0.0 && r < 1.0, "appendix radius must lie in (0, 1)");
    const auto gl = gauss_legendre(spec.jacobi_nodes);
    double sum = 0.0;
    for (std::size_t i = 0; i < gl->nodes.size(); ++i) {
        const double v = 0.5 * r * (1.0 + gl->nodes[i]);
        sum += 0.5 * r * gl->weights[i] * std::expm1(-s * std::log1p(-v * v)) / v;
    }
    return sum;
}

/// (1-s) int_{1+r}^inf dt / (t (t^2-1)^s), in the variable tau = t - 1 with
/// dyadic panels starting at r.
inline double scaled_exterior_integral(double s, double r, const QuadratureSpec& spec = {})
{
    require_order(s);
    require(r > 0.0, "appendix radius must be positive");
    // integrand <= 2^{...} t^{-1-2s}; tail bound (t-1)^{-2s}... conservatively 2 tau^{-1-2s}
    const TruncationRadius tr = truncation_radius(spec.truncation_tol, 2.0, 2.0 * s, spec.max_radius_cap);
    const double top = std::max(tr.radius, 4.0 * r + 4.0);
    std::vector<double> x, w;
    const auto edges = detail::dyadic_edges(r, top, {});
    detail::append_panels(edges, spec.smooth_nodes, std::numeric_limits<double>::infinity(), x, w);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double tau = x[i];
        const double t = 1.0 + tau;
        sum += w[i] / (t * std::pow(tau * (2.0 + tau), s));
    }
    return (1.0 - s) * sum;
}

/// r_k = 0.1 * 2^{-k}, k = 0..7.
inline std::vector<double> default_appendix_grid()
{
    std::vector<double> g;
    for (int k = 0; k < 8; ++k)
        g.push_back(std::ldexp(0.1, -k));
    return g;
}

/// Evaluate the three appendix integrals. scaled_s is the order used for
/// the (1-s)-scaled exterior integral (close to 1).
inline AppendixReport appendix_checks(double s, std::vector<double> r_grid = {}, double scaled_s = 0.999,
    const QuadratureSpec& spec = {})
{
    require_order(s);
    require_order(scaled_s);
    if (r_grid.empty())
        r_grid = default_appendix_grid();
    AppendixReport rep;
    rep.s = s;
    rep.r_grid = r_grid;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double r : r_grid) {
        const double b = bounded_integral(s, r, spec);
        rep.bounded_values.push_back(b);
        rep.bounded_closed_form.push_back(bounded_integral_closed_form(s, r));
        lo = std::min(lo, std::abs(b));
        hi = std::max(hi, std::abs(b));
        const double t = tail_integral(s, r, spec);
        rep.tail_values.push_back(t);
        rep.tail_ratios.push_back(t / (r * r));
        rep.scaled_values.push_back(scaled_exterior_integral(scaled_s, r, spec));
    }
    rep.bounded_ratio = hi / lo;
    rep.bounded_pass = rep.bounded_ratio < 2.0;
    rep.tail_target = 0.5 * s;
    rep.tail_error = std::abs(rep.tail_ratios.back() - rep.tail_target) / rep.tail_target;
    rep.tail_slope = fit_log_slope(rep.r_grid, rep.tail_values, 0, rep.r_grid.size()).slope;
    rep.tail_pass = rep.tail_error < 0.02;
    rep.scaled_pass = true;
    for (double v : rep.scaled_values)
        rep.scaled_pass = rep.scaled_pass && v < 0.01;
    rep.pass = rep.bounded_pass && rep.tail_pass && rep.scaled_pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Convergence of the (s,p)-mean

struct MeanConvergenceReport {
    std::vector<double> r_grid;
    std::vector<double> deviations;  // |m_rsp - u(x)|
    double expected_rate = 0.0;      // 2s - (p-2)(1-s)
    double fitted_slope = std::numeric_limits<double>::quiet_NaN();
    bool in_range = false;           // p < 2/(1-s)
    bool monotone = false;
    bool asserted = false;
    bool pass = true;
};

/// |m_rsp - u(x)| over r_grid. Inside p < 2/(1-s) the sequence must
/// decrease monotonically with slope at least the expected rate - 0.3;
/// outside it is only reported.
inline MeanConvergenceReport mean_convergence_check(const ScalarField& u, const Vec& x, double s, double p,
    std::vector<double> r_grid = {}, const QuadratureSpec& spec = {})
{
    require_order(s);
    require_exponent(p);
    if (is_critical(u, x))
        throw DomainError("mean convergence check requires grad u(x) != 0");
    if (r_grid.empty())
        r_grid = default_r_grid(u, x);
    MeanConvergenceReport rep;
    rep.r_grid = r_grid;
    rep.expected_rate = 2.0 * s - (p - 2.0) * (1.0 - s);
    rep.in_range = p < 2.0 / (1.0 - s);
    for (double r : r_grid) {
        const OperatorParams params{u.dimension(), s, p, x, r};
        rep.deviations.push_back(std::abs(m_rsp(u, params, spec) - u.value(x)));
    }
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.deviations.size(); ++i)
        rep.monotone = rep.monotone && rep.deviations[i] < rep.deviations[i - 1];
    rep.fitted_slope = fit_log_slope(rep.r_grid, rep.deviations, 0, rep.r_grid.size()).slope;
    rep.asserted = rep.in_range;
    rep.pass = !rep.asserted || (rep.monotone && rep.fitted_slope >= rep.expected_rate - 0.3);
    return rep;
}

} // namespace fracmv

#endif // FRACMV_ASYMPTOTICS_HPP
