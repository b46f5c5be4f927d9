// Independent reference integrals for the tests. Everything here uses
// Boost quadrature, never the library's own rules.
#ifndef FRACMV_TESTS_ORACLES_HPP
#define FRACMV_TESTS_ORACLES_HPP

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// |S^{n-1}| with the two-point convention for n = 1.
inline double sphere_area(int n)
{
    return n == 1 ? 2.0 : n == 2 ? 2.0 * pi : 4.0 * pi;
}

/// int_a^b f, integrable endpoint singularities allowed.
template <class F>
double finite(F f, double a, double b)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-14);
}

/// int_a^inf f.
template <class F>
double half_line(F f, double a)
{
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([&](double t) { return f(a + t); }, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

/// Adaptive Gauss-Kronrod on a smooth finite interval.
template <class F>
double smooth(F f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

/// int_1^inf dt / (t (t^2-1)^s), split at 2.
inline double radial_kernel_mass(double s)
{
    auto f = [s](double t) { return 1.0 / (t * std::pow((t - 1.0) * (t + 1.0), s)); };
    auto near = [s](double u) { return 1.0 / ((1.0 + u) * std::pow(u * (2.0 + u), s)); };
    return finite(near, 0.0, 1.0) + half_line(f, 2.0);
}

} // namespace oracle

#endif
