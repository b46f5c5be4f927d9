#ifndef FRACMV_QUADRATURE_HPP
#define FRACMV_QUADRATURE_HPP

#include "fracmv/core.hpp"
#include "fracmv/special_functions.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <tuple>
#include <vector>

namespace fracmv {

/// Node counts, cutoffs and tolerances shared by every integral.
struct QuadratureSpec {
    int jacobi_nodes = 64;       // endpoint-singular panels
    int smooth_nodes = 128;      // per dyadic panel
    int sphere_order = 64;       // n=2: angles; n=3: order/2 polar x order azimuth
    double inner_cutoff = 0.0;   // epsilon of the ray integral; 0 picks it automatically
    double truncation_tol = 1e-9;
    double max_radius_cap = 1e20;
    long max_nodes = 40'000'000; // budget for oscillation-resolving panels
    bool self_check = false;     // re-evaluate at doubled resolution and compare

    void validate() const
    {
        require(jacobi_nodes >= 2 && smooth_nodes >= 2 && sphere_order >= 2,
            "quadrature node counts must be >= 2");
        require(sphere_order % 2 == 0, "sphere_order must be even");
        require(inner_cutoff >= 0.0, "inner_cutoff must be >= 0 (0 = automatic)");
        require(truncation_tol > 0.0, "truncation_tol must be positive");
        require(max_radius_cap > 0.0, "max_radius_cap must be positive");
    }

    /// Same spec at doubled resolution.
    QuadratureSpec refined() const
    {
        QuadratureSpec r = *this;
        r.jacobi_nodes *= 2;
        r.smooth_nodes *= 2;
        r.sphere_order *= 2;
        r.self_check = false;
        return r;
    }
};

/// Nodes and weights on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Golub-Welsch eigenvalues of the Jacobi matrix, weights from the
// Christoffel sum of orthonormal polynomials.
inline Rule compute_gauss_jacobi(int count, double a, double b)
{
    const int m = count;
    Eigen::VectorXd diag(m);
    Eigen::VectorXd sub(std::max(m - 1, 1));
    std::vector<double> alpha(m), sqrt_beta(m + 1, 0.0);
    const double ab = a + b;
    const double mu0 = std::pow(2.0, ab + 1.0) * special::gamma(a + 1.0) * special::gamma(b + 1.0)
        / special::gamma(ab + 2.0);
    for (int k = 0; k < m; ++k) {
        if (k == 0) {
            alpha[k] = (b - a) / (ab + 2.0);
        } else {
            const double t = 2.0 * k + ab;
            alpha[k] = (b * b - a * a) / (t * (t + 2.0));
        }
        diag(k) = alpha[k];
    }
    for (int k = 1; k <= m; ++k) {
        const double t = 2.0 * k + ab;
        const double beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
        sqrt_beta[k] = std::sqrt(beta);
        if (k < m)
            sub(k - 1) = sqrt_beta[k];
    }
    Rule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    if (m == 1) {
        rule.nodes[0] = alpha[0];
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::EigenvaluesOnly);
        for (int i = 0; i < m; ++i)
            rule.nodes[i] = solver.eigenvalues()(i);
    }

    // orthonormal recurrence at x; returns (p_m(x), p_m'(x), sum_{k<m} p_k^2)
    auto evaluate = [&](double x) {
        double p_prev = 0.0, dp_prev = 0.0;
        double p = 1.0 / std::sqrt(mu0), dp = 0.0;
        double sum = p * p;
        for (int k = 0; k < m; ++k) {
            const double p_next = ((x - alpha[k]) * p - sqrt_beta[k] * p_prev) / sqrt_beta[k + 1];
            const double dp_next = (p + (x - alpha[k]) * dp - sqrt_beta[k] * dp_prev) / sqrt_beta[k + 1];
            p_prev = p;
            dp_prev = dp;
            p = p_next;
            dp = dp_next;
            if (k + 1 < m)
                sum += p * p;
        }
        return std::tuple{p, dp, sum};
    };

    for (int i = 0; i < m; ++i) {
        double x = rule.nodes[i];
        // two Newton polishing steps on p_m
        for (int it = 0; it < 2; ++it) {
            const auto [p, dp, sum] = evaluate(x);
            (void)sum;
            if (dp != 0.0) {
                const double step = p / dp;
                if (std::abs(step) < 1e-8)
                    x -= step;
            }
        }
        x = std::clamp(x, -1.0, 1.0);
        rule.nodes[i] = x;
        const auto [p, dp, sum] = evaluate(x);
        (void)p;
        (void)dp;
        rule.weights[i] = 1.0 / sum;
    }
    return rule;
}

class RuleCache {
public:
    std::shared_ptr<const Rule> get(int count, double a, double b)
    {
        const auto key = std::tuple{count, a, b};
        {
            std::shared_lock lock(mutex_);
            if (auto it = rules_.find(key); it != rules_.end())
                return it->second;
        }
        auto rule = std::make_shared<const Rule>(compute_gauss_jacobi(count, a, b));
        std::unique_lock lock(mutex_);
        return rules_.emplace(key, std::move(rule)).first->second;
    }

private:
    std::shared_mutex mutex_;
    std::map<std::tuple<int, double, double>, std::shared_ptr<const Rule>> rules_;
};

inline RuleCache& rule_cache()
{
    static RuleCache cache;
    return cache;
}

} // namespace detail

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1,1], a, b > -1.
/// Memoized; the returned table is shared and read-only.
inline std::shared_ptr<const Rule> gauss_jacobi(int count, double a, double b)
{
    require(count >= 1, "rule size must be >= 1");
    require(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    return detail::rule_cache().get(count, a, b);
}

inline std::shared_ptr<const Rule> gauss_legendre(int count)
{
    return gauss_jacobi(count, 0.0, 0.0);
}

// ---------------------------------------------------------------------------
// Truncation radius

struct TruncationRadius {
    double radius = 0.0;
    bool capped = false;
};

/// Smallest R with sup_bound * R^{-exponent} / exponent <= tol, limited by
/// max_radius_cap (flagged).
inline TruncationRadius truncation_radius(double tol, double sup_bound, double exponent,
    double max_radius_cap = QuadratureSpec{}.max_radius_cap)
{
    require(tol > 0.0 && sup_bound > 0.0 && exponent > 0.0,
        "truncation_radius arguments must be positive");
    const double radius = std::pow(sup_bound / (exponent * tol), 1.0 / exponent);
    if (radius > max_radius_cap)
        return {max_radius_cap, true};
    return {radius, false};
}

// ---------------------------------------------------------------------------
// Radial rules

/// Quadrature on a half line (or a truncated part of it). Weights already
/// contain any singular kernel factor, so integrate(f) approximates the
/// weighted integral directly.
struct RadialRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double radius = 0.0;  // truncation radius
    bool capped = false;  // radius limited by max_radius_cap or node budget

    template <class F>
    double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(nodes[i]);
        return sum;
    }

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline constexpr int grading_levels = 48;

inline void append_legendre(double lo, double hi, int count, std::vector<double>& x, std::vector<double>& w)
{
    const auto rule = gauss_legendre(count);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
        x.push_back(mid + half * rule->nodes[i]);
        w.push_back(half * rule->weights[i]);
    }
}

/// Panel edges on [lo, hi]: geometric (ratio 2) from lo, breakpoints with
/// geometric grading on both sides.
inline std::vector<double> dyadic_edges(double lo, double hi, std::span<const double> breakpoints)
{
    std::vector<double> edges{lo};
    double e = 2.0 * lo;
    while (e < hi) {
        edges.push_back(e);
        e *= 2.0;
    }
    edges.push_back(hi);
    for (double b : breakpoints) {
        if (!(b > lo && b < hi))
            continue;
        const auto it = std::upper_bound(edges.begin(), edges.end(), b);
        const double left = *(it - 1);
        const double right = *it;
        std::vector<double> extra{b};
        for (int k = 1; k <= grading_levels; ++k) {
            const double scale = std::ldexp(1.0, -k);
            if (b - left > 0.0)
                extra.push_back(b - (b - left) * scale);
            if (right - b > 0.0)
                extra.push_back(b + (right - b) * scale);
        }
        edges.insert(edges.end(), extra.begin(), extra.end());
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    return edges;
}

/// Gauss-Legendre on every panel; panels longer than the oscillation
/// allowance are split. Graded panels (tiny relative to their position)
/// use a shorter rule.
inline void append_panels(const std::vector<double>& edges, int smooth_nodes, double oscillation_length,
    std::vector<double>& x, std::vector<double>& w)
{
    const int graded_nodes = std::max(8, smooth_nodes / 8);
    // 16 nodes per oscillation period
    const double max_len = std::isfinite(oscillation_length)
        ? oscillation_length * std::max(1.0, smooth_nodes / 16.0)
        : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i];
        const double hi = edges[i + 1];
        const double len = hi - lo;
        if (len <= 0.0)
            continue;
        const bool graded = len < 0.2 * lo;
        if (len > max_len) {
            const long pieces = static_cast<long>(std::ceil(len / max_len));
            const double step = len / static_cast<double>(pieces);
            for (long k = 0; k < pieces; ++k)
                append_legendre(lo + k * step, k + 1 == pieces ? hi : lo + (k + 1) * step, smooth_nodes, x, w);
        } else {
            append_legendre(lo, hi, graded ? graded_nodes : smooth_nodes, x, w);
        }
    }
}

/// Largest radius whose oscillation-resolving panels fit the node budget.
inline double budget_radius(double start, double oscillation_length, long max_nodes)
{
    if (!std::isfinite(oscillation_length))
        return std::numeric_limits<double>::infinity();
    const double nodes_per_length = 16.0 / oscillation_length;
    return start + static_cast<double>(max_nodes) / std::max(nodes_per_length, 1e-300);
}

} // namespace detail

/// Rule for int_r^R g(rho) (rho^2 - r^2)^{-s} drho: Gauss-Jacobi with weight
/// (rho - r)^{-s} on (r, 2r], dyadic Gauss-Legendre panels beyond.
inline RadialRule annulus_rule(double r, double s, double radius, const QuadratureSpec& spec,
    std::span<const double> breakpoints = {},
    double oscillation_length = std::numeric_limits<double>::infinity())
{
    require(r > 0.0, "annulus radius must be positive");
    require_order(s);
    RadialRule rule;
    rule.radius = std::max(radius, 2.0 * r);
    const double budget = detail::budget_radius(2.0 * r, oscillation_length, spec.max_nodes);
    if (rule.radius > budget) {
        rule.radius = std::max(budget, 2.0 * r);
        rule.capped = true;
    }

    // (r, 2r]: rho = r + (r/2)(1+x), weight (1+x)^{-s}
    const auto jac = gauss_jacobi(spec.jacobi_nodes, 0.0, -s);
    const double half = 0.5 * r;
    const double scale = std::pow(half, 1.0 - s);
    for (std::size_t i = 0; i < jac->nodes.size(); ++i) {
        const double t = half * (1.0 + jac->nodes[i]); // rho - r, computed without cancellation
        rule.nodes.push_back(r + t);
        rule.weights.push_back(scale * jac->weights[i] * std::pow(2.0 * r + t, -s));
    }

    std::vector<double> x, w;
    const auto edges = detail::dyadic_edges(2.0 * r, rule.radius, breakpoints);
    detail::append_panels(edges, spec.smooth_nodes, oscillation_length, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
        rule.nodes.push_back(x[i]);
        rule.weights.push_back(w[i] * std::pow((x[i] - r) * (x[i] + r), -s));
    }
    return rule;
}

/// Rule for int_0^R rho^b f(rho) drho, b > -1: Gauss-Jacobi with weight
/// rho^b on (0, inner], dyadic Gauss-Legendre panels beyond.
inline RadialRule power_rule(double inner, double b, double radius, const QuadratureSpec& spec,
    std::span<const double> breakpoints = {},
    double oscillation_length = std::numeric_limits<double>::infinity())
{
    require(inner > 0.0, "inner radius must be positive");
    require(b > -1.0, "power weight exponent must exceed -1");
    RadialRule rule;
    rule.radius = std::max(radius, inner);
    const double budget = detail::budget_radius(inner, oscillation_length, spec.max_nodes);
    if (rule.radius > budget) {
        rule.radius = std::max(budget, inner);
        rule.capped = true;
    }
    const auto jac = gauss_jacobi(spec.jacobi_nodes, 0.0, b);
    const double half = 0.5 * inner;
    const double scale = std::pow(half, 1.0 + b);
    for (std::size_t i = 0; i < jac->nodes.size(); ++i) {
        rule.nodes.push_back(half * (1.0 + jac->nodes[i]));
        rule.weights.push_back(scale * jac->weights[i]);
    }
    if (rule.radius > inner) {
        std::vector<double> x, w;
        const auto edges = detail::dyadic_edges(inner, rule.radius, breakpoints);
        detail::append_panels(edges, spec.smooth_nodes, oscillation_length, x, w);
        for (std::size_t i = 0; i < x.size(); ++i) {
            rule.nodes.push_back(x[i]);
            rule.weights.push_back(w[i] * std::pow(x[i], b));
        }
    }
    return rule;
}

/// Declared decay |g(rho)| <= constant * rho^{-exponent} for large rho.
struct Decay {
    double constant = 1.0;
    double exponent = 1.0;
};

/// Tail bound of the annulus kernel beyond R for an integrand obeying decay.
inline double annulus_tail_bound(double r, double s, double radius, Decay decay)
{
    const double q = decay.exponent + 2.0 * s - 1.0;
    if (decay.constant == 0.0)
        return 0.0;
    return decay.constant * std::pow(1.0 - (r / radius) * (r / radius), -s) * std::pow(radius, -q) / q;
}

/// int_R^inf rho^{-1-a} (rho^2 - r^2)^{-s} drho for R >= 2r and a + 2s > 0,
/// from the binomial series of (1 - r^2/rho^2)^{-s}. With from = 1 the
/// leading term is dropped, which gives the same tail against the kernel
/// difference (rho^2 - r^2)^{-s} - rho^{-2s}.
inline double annulus_power_tail(double r, double s, double radius, double a, int from = 0)
{
    require(radius >= 2.0 * r, "closed-form annulus tail needs R >= 2r");
    const double c = 0.5 * a + s;
    require(c > 0.0, "annulus tail exponent must be positive");
    const double x = (r / radius) * (r / radius);
    double coef = 1.0;  // (s)_k / k!
    double xk = 1.0;
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        if (k >= from) {
            const double term = coef * xk / (c + k);
            sum += term;
            if (term <= 1e-18 * sum)
                break;
        }
        coef *= (s + k) / (k + 1.0);
        xk *= x;
    }
    return 0.5 * std::pow(radius, -2.0 * c) * sum;
}

/// Radius at which annulus_tail_bound drops below tol.
inline TruncationRadius annulus_truncation(double r, double s, Decay decay, const QuadratureSpec& spec)
{
    const double q = decay.exponent + 2.0 * s - 1.0;
    if (!(q > 0.0)) {
        std::ostringstream msg;
        msg << "nonconvergent annulus tail: declared decay exponent " << decay.exponent
            << " with s = " << s << " leaves rho^{" << -q - 1.0 << "} not integrable";
        throw NumericalError(msg.str());
    }
    if (decay.constant == 0.0)
        return {4.0 * r, false};
    // (1 - r^2/R^2)^{-s} <= (4/3)^s once R >= 2r
    auto tr = truncation_radius(spec.truncation_tol, decay.constant * std::pow(4.0 / 3.0, s), q,
        spec.max_radius_cap);
    tr.radius = std::max(tr.radius, 4.0 * r);
    return tr;
}

/// int_r^inf g(rho) (rho^2 - r^2)^{-s} drho.
///
/// The endpoint factor is absorbed by Gauss-Jacobi on (r, 2r]; the remainder
/// uses dyadic panels up to a radius where the declared decay bounds the
/// tail by truncation_tol. Throws when the tail does not converge or g
/// violates the declared decay at the truncation radius.
template <class G>
double annulus_integral(G&& g, double r, double s, const QuadratureSpec& spec, Decay decay = {},
    std::span<const double> breakpoints = {},
    double oscillation_length = std::numeric_limits<double>::infinity())
{
    spec.validate();
    require(r > 0.0, "annulus radius must be positive");
    require_order(s);
    const TruncationRadius tr = annulus_truncation(r, s, decay, spec);
    for (double rho : {tr.radius, 2.0 * tr.radius}) {
        const double bound = decay.constant * std::pow(rho, -decay.exponent);
        const double value = std::abs(g(rho));
        if (value > 1.000001 * bound + 1e-300) {
            std::ostringstream msg;
            msg << "integrand does not decay as declared: |g(" << rho << ")| = " << value
                << " exceeds " << decay.constant << " * rho^-" << decay.exponent;
            throw NumericalError(msg.str());
        }
    }
    const RadialRule rule = annulus_rule(r, s, tr.radius, spec, breakpoints, oscillation_length);
    return rule.integrate(g);
}

// ---------------------------------------------------------------------------
// Ray principal-value integral

/// Growth of a ray integrand: |h(rho)| <= constant + coefficient * rho^exponent.
struct Growth {
    double constant = 1.0;
    double coefficient = 0.0;
    double exponent = 0.0;
};

/// h(rho) == value for rho >= radius.
struct RayFarValue {
    double radius = 0.0;
    double value = 0.0;
};

struct RayIntegralInfo {
    double value = 0.0;
    double inner_cutoff = 0.0;
    double inner_bound = 0.0;  // bound on the dropped (0, eps] piece
    double radius = 0.0;
    double tail_bound = 0.0;
    bool capped = false;
};

/// int_0^inf h(rho) rho^{-1-2s} drho for s in (1/2,1) and h = O(rho^2) at 0.
///
/// Without `second_order`, (0, eps] is dropped after bounding it by
/// sup|h/rho^2| eps^{2-2s}/(2-2s) < truncation_tol. When the coefficient h2
/// of h(rho) = h2 rho^2 + O(rho^4) is supplied, (0, eps] contributes
/// h2 eps^{2-2s}/(2-2s) and only the O(rho^4) remainder is bounded, which
/// keeps eps practical as s -> 1. (eps, R] uses dyadic panels with graded
/// refinement at the breakpoints; the tail beyond R is bounded from growth,
/// or added exactly when h is known to be constant there.
/// h must be evaluated stably for tiny rho (e.g. by its Taylor form).
template <class H>
RayIntegralInfo ray_pv_integral_info(H&& h, double s, Growth growth, const QuadratureSpec& spec,
    std::span<const double> breakpoints = {}, double scale = 1.0,
    double oscillation_length = std::numeric_limits<double>::infinity(),
    std::optional<double> second_order = std::nullopt, std::optional<RayFarValue> far = std::nullopt)
{
    spec.validate();
    require_upper_order(s);
    require(scale > 0.0, "ray scale must be positive");
    require(growth.exponent < 2.0 * s, "ray integrand grows too fast for the rho^{-1-2s} kernel");
    RayIntegralInfo info;

    // near-origin behaviour of h / rho^2 sampled on a dyadic ladder
    const int ladder = second_order ? 20 : 40;
    double local = 0.0;
    double coarse = 0.0;
    double fine = 0.0;
    double remainder = 0.0;
    for (int k = 1; k <= ladder; ++k) {
        const double rho = scale * std::ldexp(1.0, -k);
        const double value = h(rho);
        const double q = std::abs(value) / (rho * rho);
        local = std::max(local, q);
        if (second_order)
            remainder = std::max(remainder, std::abs(value - *second_order * rho * rho) / (rho * rho * rho * rho));
        if (k == ladder / 2)
            coarse = q;
        if (k == ladder)
            fine = q;
    }
    if (fine > 1e3 * std::max(coarse, 1e-300) && fine > 1e-12) {
        const double order = 2.0 + std::log(fine / coarse) / std::log(std::ldexp(1.0, -ladder / 2));
        std::ostringstream msg;
        msg << "near-origin bound not satisfiable: |h(rho)/rho^2| grows from " << coarse << " to " << fine
            << " as rho -> 0 (h behaves like rho^" << order << ", need rho^2)";
        throw NumericalError(msg.str());
    }
    const double e = second_order ? 4.0 - 2.0 * s : 2.0 - 2.0 * s;
    const double bound = second_order ? 2.0 * remainder + 1e-300 : 2.0 * local + 1e-300;
    double eps = spec.inner_cutoff > 0.0 ? spec.inner_cutoff : std::pow(spec.truncation_tol * e / bound, 1.0 / e);
    eps = std::clamp(eps, 1e-300, 0.5 * scale);
    eps = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(eps))));
    while (bound * std::pow(eps, e) / e >= spec.truncation_tol && eps > 1e-300)
        eps *= 0.5;
    if (bound * std::pow(eps, e) / e >= spec.truncation_tol) {
        std::ostringstream msg;
        msg << "near-origin bound not satisfiable: sup|h/rho^2| = " << local << " needs eps^" << e
            << " below " << spec.truncation_tol;
        throw NumericalError(msg.str());
    }
    info.inner_cutoff = eps;
    info.inner_bound = bound * std::pow(eps, e) / e;
    double inner = 0.0;
    if (second_order)
        inner = *second_order * std::pow(eps, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);

    // tail: (C0 + C1 rho^g) rho^{-1-2s} <= (C0 + C1) rho^{g-1-2s} for rho >= 1
    const double sup = growth.constant + growth.coefficient;
    double radius = 2.0 * scale;
    const double budget = detail::budget_radius(eps, oscillation_length, spec.max_nodes);
    if (far && std::max(far->radius, 2.0 * scale) <= budget) {
        radius = std::max(far->radius, 2.0 * scale);
        inner += far->value * std::pow(radius, -2.0 * s) / (2.0 * s);
        info.radius = radius;
        info.tail_bound = 0.0;
    } else {
        if (sup > 0.0) {
            const auto tr
                = truncation_radius(spec.truncation_tol, sup, 2.0 * s - growth.exponent, spec.max_radius_cap);
            radius = std::max({tr.radius, 2.0 * scale, 1.0});
            info.capped = tr.capped;
        }
        if (radius > budget) {
            radius = budget;
            info.capped = true;
        }
        info.radius = radius;
        info.tail_bound
            = sup > 0.0 ? sup * std::pow(radius, growth.exponent - 2.0 * s) / (2.0 * s - growth.exponent) : 0.0;
    }

    std::vector<double> x, w;
    const auto edges = detail::dyadic_edges(eps, radius, breakpoints);
    detail::append_panels(edges, spec.smooth_nodes, oscillation_length, x, w);
    double sum = inner;
    for (std::size_t i = 0; i < x.size(); ++i)
        sum += w[i] * h(x[i]) * std::pow(x[i], -1.0 - 2.0 * s);
    info.value = sum;
    return info;
}

template <class H>
double ray_pv_integral(H&& h, double s, Growth growth, const QuadratureSpec& spec,
    std::span<const double> breakpoints = {}, double scale = 1.0,
    double oscillation_length = std::numeric_limits<double>::infinity(),
    std::optional<double> second_order = std::nullopt)
{
    return ray_pv_integral_info(std::forward<H>(h), s, growth, spec, breakpoints, scale, oscillation_length,
        second_order)
        .value;
}

// ---------------------------------------------------------------------------
// Sphere rules

struct SphereRule {
    int n = 0;
    std::vector<Vec> nodes;
    std::vector<double> weights;

    template <class F>
    double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(nodes[i]);
        return sum;
    }

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline Vec unit(int n, int axis)
{
    Vec e = Vec::Zero(n);
    e(axis) = 1.0;
    return e;
}

inline Vec circle_point(double theta)
{
    Vec w(2);
    w << std::cos(theta), std::sin(theta);
    return w;
}

/// Orthonormal pair completing a unit vector in R^3.
inline std::pair<Vec, Vec> complete_frame(const Vec& axis)
{
    int least = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(axis(i)) < std::abs(axis(least)))
            least = i;
    const Eigen::Vector3d a(axis(0), axis(1), axis(2));
    Eigen::Vector3d e1 = a.cross(Eigen::Vector3d::Unit(least)).normalized();
    Eigen::Vector3d e2 = a.cross(e1);
    Vec u(3), v(3);
    u << e1(0), e1(1), e1(2);
    v << e2(0), e2(1), e2(2);
    return {u, v};
}

} // namespace detail

/// Full-sphere rule on S^{n-1}.
/// n=1: the two points {-1,+1}; n=2: periodic trapezoid at half-offset
/// angles; n=3: Gauss-Legendre in cos(polar) x trapezoid in azimuth.
/// Every rule is antipodally symmetric.
inline SphereRule sphere_rule(int n, int order)
{
    require_dimension(n);
    require(order >= 2 && order % 2 == 0, "sphere order must be even and >= 2");
    SphereRule rule;
    rule.n = n;
    if (n == 1) {
        rule.nodes = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
        rule.weights = {1.0, 1.0};
    } else if (n == 2) {
        const double h = 2.0 * pi / order;
        for (int k = 0; k < order; ++k) {
            rule.nodes.push_back(detail::circle_point((k + 0.5) * h));
            rule.weights.push_back(h);
        }
    } else {
        const int polar = std::max(2, order / 2);
        const int azimuth = order;
        const auto gl = gauss_legendre(polar);
        const double h = 2.0 * pi / azimuth;
        for (int i = 0; i < polar; ++i) {
            const double t = gl->nodes[i];
            const double rad = std::sqrt(std::max(0.0, 1.0 - t * t));
            for (int j = 0; j < azimuth; ++j) {
                const double phi = (j + 0.5) * h;
                Vec w(3);
                w << rad * std::cos(phi), rad * std::sin(phi), t;
                rule.nodes.push_back(w);
                rule.weights.push_back(gl->weights[i] * h);
            }
        }
    }
    return rule;
}

/// One representative of every antipodal pair of sphere_rule(n, order), with
/// doubled weight. Integrates even functions exactly as the full rule does.
inline SphereRule hemisphere_rule(int n, int order)
{
    const SphereRule full = sphere_rule(n, order);
    SphereRule half;
    half.n = n;
    for (std::size_t i = 0; i < full.nodes.size(); ++i) {
        const Vec& w = full.nodes[i];
        // first nonzero coordinate positive; the rules contain no node with
        // a vanishing leading coordinate on the symmetric sets used here
        const bool keep = n == 1 ? w(0) > 0.0 : (n == 2 ? w(1) > 0.0 : w(2) > 0.0);
        if (keep) {
            half.nodes.push_back(w);
            half.weights.push_back(2.0 * full.weights[i]);
        }
    }
    return half;
}

/// Circle rule for integrands that are singular (kinks, |t|^a) at known
/// angles. Each arc between consecutive breakpoints gets Gauss-Legendre
/// nodes under the sigmoid tau -> 35 tau^4 - 84 tau^5 + 70 tau^6 - 20 tau^7,
/// whose derivative 140 tau^3 (1-tau)^3 flattens the endpoint singularities.
/// With `half` the rule covers [0, pi) with doubled weights and the
/// breakpoints are taken mod pi, matching hemisphere_rule(2, .). Without
/// breakpoints this is hemisphere_rule / sphere_rule.
inline SphereRule graded_circle_rule(std::vector<double> breakpoints, int order, bool half)
{
    require(order >= 2 && order % 2 == 0, "sphere order must be even and >= 2");
    if (breakpoints.empty())
        return half ? hemisphere_rule(2, order) : sphere_rule(2, order);
    const double period = half ? pi : 2.0 * pi;
    for (double& b : breakpoints) {
        b = std::fmod(b, period);
        if (b < 0.0)
            b += period;
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> edges;
    for (double b : breakpoints)
        if (edges.empty() || b - edges.back() > 1e-12)
            edges.push_back(b);
    if (edges.size() > 1 && edges.front() + period - edges.back() <= 1e-12)
        edges.pop_back();
    edges.push_back(edges.front() + period);

    SphereRule rule;
    rule.n = 2;
    const double scale = half ? 2.0 : 1.0;
    for (std::size_t a = 0; a + 1 < edges.size(); ++a) {
        const double lo = edges[a];
        const double len = edges[a + 1] - lo;
        const int count = std::max(16, static_cast<int>(std::ceil(order * len / pi)));
        const auto gl = gauss_legendre(count);
        for (std::size_t i = 0; i < gl->nodes.size(); ++i) {
            const double t = 0.5 * (1.0 + gl->nodes[i]);
            const double t2 = t * t, m = 1.0 - t;
            const double psi = t2 * t2 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t2 * t);
            const double dpsi = 140.0 * t2 * t * m * m * m;
            rule.nodes.push_back(detail::circle_point(lo + len * psi));
            rule.weights.push_back(scale * len * dpsi * 0.5 * gl->weights[i]);
        }
    }
    return rule;
}

/// Rule on the cap {w in S^{n-1} : w . axis >= threshold}, exact for the
/// indicator (nodes only inside the cap). n in {1,2,3}.
inline SphereRule cap_rule(int n, const Vec& axis, double threshold, int order)
{
    require_dimension(n);
    require(axis.size() == n, "cap axis dimension mismatch");
    require(threshold >= -1.0 && threshold < 1.0, "cap threshold must lie in [-1,1)");
    const Vec xi = axis.normalized();
    SphereRule rule;
    rule.n = n;
    if (n == 1) {
        for (double sign : {1.0, -1.0}) {
            if (sign * xi(0) >= threshold) {
                rule.nodes.push_back(Vec::Constant(1, sign));
                rule.weights.push_back(1.0);
            }
        }
    } else if (n == 2) {
        const double a = std::acos(threshold);
        const double center = std::atan2(xi(1), xi(0));
        const auto gl = gauss_legendre(order);
        for (std::size_t i = 0; i < gl->nodes.size(); ++i) {
            rule.nodes.push_back(detail::circle_point(center + a * gl->nodes[i]));
            rule.weights.push_back(a * gl->weights[i]);
        }
    } else {
        const auto [u, v] = detail::complete_frame(xi);
        const int polar = std::max(2, order / 2);
        const int azimuth = order;
        const auto gl = gauss_legendre(polar);
        const double half = 0.5 * (1.0 - threshold);
        const double mid = 0.5 * (1.0 + threshold);
        const double h = 2.0 * pi / azimuth;
        for (int i = 0; i < polar; ++i) {
            const double t = mid + half * gl->nodes[i];
            const double rad = std::sqrt(std::max(0.0, 1.0 - t * t));
            for (int j = 0; j < azimuth; ++j) {
                const double phi = (j + 0.5) * h;
                rule.nodes.push_back(t * xi + rad * (std::cos(phi) * u + std::sin(phi) * v));
                rule.weights.push_back(half * gl->weights[i] * h);
            }
        }
    }
    return rule;
}

/// int_{S^{n-1}} h(w) dw with the default rule of the spec.
template <class H>
double sphere_integral(H&& h, int n, const QuadratureSpec& spec)
{
    spec.validate();
    require(n >= 1 && n <= 3, "sphere_integral supports n in {1,2,3}, got " + std::to_string(n));
    return sphere_rule(n, spec.sphere_order).integrate(std::forward<H>(h));
}

} // namespace fracmv

#endif // FRACMV_QUADRATURE_HPP
