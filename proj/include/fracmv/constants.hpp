#ifndef FRACMV_CONSTANTS_HPP
#define FRACMV_CONSTANTS_HPP

#include "fracmv/core.hpp"
#include "fracmv/special_functions.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>

namespace fracmv {

/// C(n,s): normalizer of the linear fractional Laplacian,
/// 2^{2s} s Gamma(n/2+s) / (pi^{n/2} Gamma(1-s)).
inline double fractional_laplacian_constant(int n, double s)
{
    require(n >= 1, "dimension n must be >= 1");
    require_order(s);
    return std::pow(2.0, 2.0 * s) * s * special::gamma(0.5 * n + s)
        / (std::pow(pi, 0.5 * n) * special::gamma(1.0 - s));
}

/// c(n,s) = Gamma(n/2) sin(pi s) / pi^{n/2+1}, the inverse mass of the
/// exterior kernel r^{2s} (|y|^2-r^2)^{-s} |y|^{-n} on {|y| > r}.
inline double mean_kernel_constant(int n, double s)
{
    require(n >= 1, "dimension n must be >= 1");
    require_order(s);
    return special::gamma(0.5 * n) * std::sin(pi * s) / std::pow(pi, 0.5 * n + 1.0);
}

/// (int_1^inf drho / (rho (rho^2-1)^s))^{-1} = 2 sin(pi s) / pi.
inline double radial_tail_constant(double s)
{
    require_order(s);
    return 2.0 * std::sin(pi * s) / pi;
}

/// Half of radial_tail_constant: the normalizer of the two-sided ray mean
/// used by the infinity kernel, sin(pi s) / pi.
inline double ray_mean_constant(double s)
{
    return 0.5 * radial_tail_constant(s);
}

struct DirectionalMoments {
    double gamma_p;        // int_{S^{n-1}} |w_n|^{p-2} w_j^2, j != n
    double gamma_p_prime;  // int_{S^{n-1}} |w_n|^{p-2} w_n^2
};

/// Gamma-ratio closed forms of the directional sphere moments. For n = 1
/// the same formulas give gamma_p' = 2 (the two-point sum) and
/// gamma_p = 2/(p-1), keeping gamma_p' / gamma_p = p - 1.
inline DirectionalMoments directional_moments(int n, double p)
{
    require_dimension(n);
    require_exponent(p);
    using special::gamma;
    const double denom = gamma(0.5 * (p + n));
    const double root_pi = std::sqrt(pi);
    DirectionalMoments m{};
    m.gamma_p = 2.0 * gamma(0.5 * (p - 1.0)) * std::pow(root_pi, n - 2) * gamma(1.5) / denom;
    m.gamma_p_prime = 2.0 * gamma(0.5 * (p + 1.0)) * std::pow(root_pi, n - 1) / denom;
    return m;
}

/// C_{n,p} = int_{S^{n-1}} |e . w|^{p-2} dw.
inline double sphere_p_moment(int n, double p)
{
    require(n >= 1, "dimension n must be >= 1");
    require_exponent(p);
    if (n == 1)
        return 2.0;
    return 2.0 * std::pow(pi, 0.5 * (n - 1)) * special::gamma(0.5 * (p - 1.0))
        / special::gamma(0.5 * (p + n - 2.0));
}

/// gamma_p (p-1) / (p C_{n,p}): the constant multiplying r^2 Delta_p u in the
/// local p-mean expansion as stated in the literature. Equal to
/// (p-1) / (p (p+n-2)); kept separate from the coefficient measured by
/// local_p_mean_coefficient() below.
inline double stated_local_p_mean_constant(int n, double p)
{
    return directional_moments(n, p).gamma_p * (p - 1.0) / (p * sphere_p_moment(n, p));
}

/// Leading coefficient k in u(x) - M_r^p u(x) = -k r^2 Delta^N_p u(x) + o(r^2)
/// for the local p-mean, obtained from the second-order Taylor expansion of
/// the weighted sphere average: (p-1) gamma_p / (2 C_{n,p}) = (p-1)/(2(p+n-2)).
inline double local_p_mean_coefficient(int n, double p)
{
    return 0.5 * (p - 1.0) * directional_moments(n, p).gamma_p / sphere_p_moment(n, p);
}

struct CapMoments {
    double alpha;      // 1/2 int (w . e2)^2 chi
    double beta;       // 1/2 int (w . e1)^2 chi - alpha
    double gamma_cap;  // (int chi)^{-1}
};

/// Moments of the cap indicator chi_{[cp,1]}(w . e1) on S^{n-1}, n in {2,3}.
inline CapMoments cap_moments(double cp, int n)
{
    require(n == 2 || n == 3,
        "cap kernel requires n in {2,3}; the two-point sphere cannot balance beta/alpha = p-2");
    require(cp >= 0.0, "cap threshold must be >= 0");
    if (!(cp < 1.0))
        throw DomainError("empty cap: threshold must be < 1, got " + std::to_string(cp));
    CapMoments m{};
    if (n == 2) {
        // cap is the arc |theta| <= a, a = arccos(cp)
        const double a = std::acos(cp);
        const double sc = cp * std::sqrt((1.0 - cp) * (1.0 + cp)); // sin a cos a
        const double mass = 2.0 * a;
        const double second_e2 = a - sc;  // int_{-a}^{a} sin^2
        const double second_e1 = a + sc;  // int_{-a}^{a} cos^2
        m.alpha = 0.5 * second_e2;
        m.beta = 0.5 * second_e1 - m.alpha;
        m.gamma_cap = 1.0 / mass;
    } else {
        // polar coordinate t = w . e1 is uniform on [-1,1] with density 2 pi
        const double one_minus = 1.0 - cp;
        const double mass = 2.0 * pi * one_minus;
        const double second_e1 = 2.0 * pi * (1.0 - cp * cp * cp) / 3.0;
        const double second_e2 = 0.5 * (mass - second_e1);
        m.alpha = 0.5 * second_e2;
        m.beta = 0.5 * second_e1 - m.alpha;
        m.gamma_cap = 1.0 / mass;
    }
    return m;
}

inline constexpr double cap_bracket_delta = 1e-6;
inline constexpr double cap_ratio_tolerance = 1e-10;

/// Threshold c_p in [0,1) with beta(c_p)/alpha(c_p) = p - 2.
inline double solve_cap_threshold(double p, int n)
{
    require_exponent(p);
    require(n == 2 || n == 3, "cap threshold requires n in {2,3}");
    const double target = p - 2.0;
    auto ratio = [n](double c) {
        const CapMoments m = cap_moments(c, n);
        return m.beta / m.alpha;
    };
    const double lo = 0.0;
    const double hi = 1.0 - cap_bracket_delta;
    const double f_lo = ratio(lo) - target;
    const double f_hi = ratio(hi) - target;
    if (f_lo == 0.0)
        return lo;
    if (f_lo > 0.0 || f_hi < 0.0) {
        std::ostringstream msg;
        msg << "no cap threshold in [0, 1-" << cap_bracket_delta << "]: achievable beta/alpha range is ["
            << ratio(lo) << ", " << ratio(hi) << "], requested " << target;
        throw NumericalError(msg.str());
    }
    std::uintmax_t iterations = 200;
    // terminate on the residual of the ratio rather than on the bracket width
    auto f = [&](double c) { return ratio(c) - target; };
    auto stop = [&](double a, double b) {
        return std::abs(f(0.5 * (a + b))) < 0.1 * cap_ratio_tolerance
            || b - a <= 4.0 * std::numeric_limits<double>::epsilon();
    };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, stop, iterations);
    double c = 0.5 * (a + b);
    if (std::abs(f(c)) >= cap_ratio_tolerance) {
        // pick whichever bracket end is closer
        c = std::abs(f(a)) < std::abs(f(b)) ? a : b;
    }
    if (std::abs(f(c)) >= cap_ratio_tolerance)
        throw NumericalError("cap threshold root search did not reach |beta/alpha-(p-2)| < 1e-10");
    return c;
}

/// All constants of a session (n, s, p). Immutable after construction.
/// Cap quantities are only filled for n in {2,3}; s-dependent ones only
/// for s in (0,1).
struct Constants {
    int n = 0;
    double s = 0.0;
    double p = 0.0;
    double C_ns = 0.0;
    double c_ns = 0.0;
    double c_s = 0.0;
    double c_s_ray = 0.0;
    double gamma_p = 0.0;
    double gamma_p_prime = 0.0;
    double C_np = 0.0;
    bool has_cap = false;
    double c_p = 0.0;
    double alpha_p = 0.0;
    double beta_p = 0.0;
    double gamma_cap = 0.0;

    static Constants make(int n, double s, double p)
    {
        require_dimension(n);
        require_order(s);
        require_exponent(p);
        Constants k;
        k.n = n;
        k.s = s;
        k.p = p;
        k.C_ns = fractional_laplacian_constant(n, s);
        k.c_ns = mean_kernel_constant(n, s);
        k.c_s = radial_tail_constant(s);
        k.c_s_ray = ray_mean_constant(s);
        const DirectionalMoments dm = directional_moments(n, p);
        k.gamma_p = dm.gamma_p;
        k.gamma_p_prime = dm.gamma_p_prime;
        k.C_np = sphere_p_moment(n, p);
        if (n >= 2) {
            k.has_cap = true;
            k.c_p = solve_cap_threshold(p, n);
            const CapMoments cm = cap_moments(k.c_p, n);
            k.alpha_p = cm.alpha;
            k.beta_p = cm.beta;
            k.gamma_cap = cm.gamma_cap;
        }
        return k;
    }
};

} // namespace fracmv

#endif // FRACMV_CONSTANTS_HPP
