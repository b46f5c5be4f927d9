#ifndef FRACMV_SPECIAL_FUNCTIONS_HPP
#define FRACMV_SPECIAL_FUNCTIONS_HPP

#include "fracmv/core.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace fracmv::special {

namespace detail {

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients). Relative
// error is below 2e-15 for real arguments in (0, 171).
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coefficients = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline double lanczos_sum(double z)
{
    // z is the shifted argument x - 1
    double sum = lanczos_coefficients[0];
    for (std::size_t k = 1; k < lanczos_coefficients.size(); ++k)
        sum += lanczos_coefficients[k] / (z + static_cast<double>(k));
    return sum;
}

} // namespace detail

/// Gamma function for real arguments. Poles at non-positive integers
/// return NaN.
inline double gamma(double x)
{
    if (std::isnan(x))
        return x;
    if (x <= 0.0 && x == std::floor(x))
        return std::numeric_limits<double>::quiet_NaN();
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return pi / (std::sin(pi * x) * gamma(1.0 - x));
    }
    if (x == std::floor(x) && x <= 21.0) {
        double f = 1.0;
        for (int k = 2; k < static_cast<int>(x); ++k)
            f *= k;
        return f;
    }
    const double z = x - 1.0;
    const double t = z + detail::lanczos_g + 0.5;
    // t^{z+1/2} e^{-t} split in two halves to postpone overflow
    const double half = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * pi) * half * (half * std::exp(-t)) * detail::lanczos_sum(z);
}

/// log|Gamma(x)| for x > 0.
inline double log_gamma(double x)
{
    require(x > 0.0, "log_gamma requires x > 0");
    if (x < 0.5)
        return std::log(pi / std::abs(std::sin(pi * x))) - log_gamma(1.0 - x);
    const double z = x - 1.0;
    const double t = z + detail::lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t
        + std::log(detail::lanczos_sum(z));
}

/// Gamma(a) / Gamma(b), stable for large arguments.
inline double gamma_ratio(double a, double b)
{
    if (a > 0.0 && b > 0.0 && (a > 20.0 || b > 20.0))
        return std::exp(log_gamma(a) - log_gamma(b));
    return gamma(a) / gamma(b);
}

/// Surface measure |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2); n = 1 gives the
/// counting measure of {-1, +1}.
inline double sphere_area(int n)
{
    return 2.0 * std::pow(pi, 0.5 * n) / gamma(0.5 * n);
}

} // namespace fracmv::special

#endif // FRACMV_SPECIAL_FUNCTIONS_HPP
