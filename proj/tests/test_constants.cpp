#include "fracmv/constants.hpp"
#include "fracmv/quadrature.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fracmv;

TEST(Gamma, MatchesStdTgammaOnZeroToThirty)
{
    for (double x = 0.05; x < 30.0; x += 0.173)
        EXPECT_NEAR(special::gamma(x) / std::tgamma(x), 1.0, 1e-12) << "x = " << x;
    EXPECT_NEAR(special::gamma(0.5), std::sqrt(pi), 1e-14);
}

TEST(MeanKernelConstant, ClosedFormExamples)
{
    EXPECT_NEAR(mean_kernel_constant(1, 0.5), 1.0 / pi, 1e-15);
    EXPECT_NEAR(mean_kernel_constant(2, 0.5), 1.0 / (pi * pi), 1e-15);
    EXPECT_LT(mean_kernel_constant(2, 1e-9), 1e-9);
    EXPECT_LT(mean_kernel_constant(2, 1.0 - 1e-9), 1e-9);
}

TEST(MeanKernelConstant, InverseOfDefiningIntegral)
{
    for (int n : {1, 2, 3})
        for (double s : {0.25, 0.5, 0.75}) {
            // r^{2s} int_{|y|>r} (|y|^2-r^2)^{-s} |y|^{-n} dy is independent of r
            const double mass = oracle::sphere_area(n) * oracle::radial_kernel_mass(s);
            EXPECT_NEAR(mean_kernel_constant(n, s) * mass, 1.0, 1e-8) << "n=" << n << " s=" << s;
        }
}

TEST(MeanKernelConstant, RejectsOutOfRange)
{
    EXPECT_THROW(mean_kernel_constant(2, 0.0), DomainError);
    EXPECT_THROW(mean_kernel_constant(2, 1.0), DomainError);
    EXPECT_THROW(mean_kernel_constant(0, 0.5), DomainError);
}

TEST(RadialTailConstant, InverseOfDefiningIntegral)
{
    EXPECT_NEAR(radial_tail_constant(0.5), 2.0 / pi, 1e-15);
    EXPECT_NEAR(radial_tail_constant(0.25), std::sqrt(2.0) / pi, 1e-15);
    for (double s : {0.25, 0.5, 0.75, 0.9})
        EXPECT_NEAR(radial_tail_constant(s) * oracle::radial_kernel_mass(s), 1.0, 1e-8) << "s=" << s;
    EXPECT_LT(radial_tail_constant(1.0 - 1e-10), 1e-9);
    EXPECT_DOUBLE_EQ(ray_mean_constant(0.7), 0.5 * radial_tail_constant(0.7));
}

TEST(FractionalLaplacianConstant, KnownValues)
{
    // n = 1, s = 1/2: C = 1/pi
    EXPECT_NEAR(fractional_laplacian_constant(1, 0.5), 1.0 / pi, 1e-14);
    // n = 3, s = 1/2: C = 1/pi^2
    EXPECT_NEAR(fractional_laplacian_constant(3, 0.5), 1.0 / (pi * pi), 1e-14);
}

namespace {

// Directional moments with polar axis e_n, by direct integration.
std::pair<double, double> directional_oracle(int n, double p)
{
    const double q = p - 2.0;
    if (n == 2) {
        // |sin t|^{q} cos^2 t and |sin t|^{q} sin^2 t over a full turn
        const double g = 2.0 * oracle::finite([q](double t) { return std::pow(std::sin(t), q) * std::cos(t) * std::cos(t); }, 0.0, pi);
        const double gp = 2.0 * oracle::finite([q](double t) { return std::pow(std::sin(t), q + 2.0); }, 0.0, pi);
        return {g, gp};
    }
    // w = (sin f cos a, sin f sin a, cos f)
    const double g = pi * 2.0 * oracle::finite([q](double f) { return std::pow(std::cos(f), q) * std::pow(std::sin(f), 3.0); }, 0.0, 0.5 * pi);
    const double gp = 2.0 * pi * 2.0
        * oracle::finite([q](double f) { return std::pow(std::cos(f), q + 2.0) * std::sin(f); }, 0.0, 0.5 * pi);
    return {g, gp};
}

} // namespace

TEST(DirectionalMoments, ClosedFormExamples)
{
    const auto m22 = directional_moments(2, 2.0);
    EXPECT_NEAR(m22.gamma_p, pi, 1e-13);
    EXPECT_NEAR(m22.gamma_p_prime, pi, 1e-13);
    EXPECT_NEAR(directional_moments(3, 2.0).gamma_p, 4.0 * pi / 3.0, 1e-13);
    const auto m24 = directional_moments(2, 4.0);
    EXPECT_NEAR(m24.gamma_p_prime / m24.gamma_p, 3.0, 1e-14);
}

TEST(DirectionalMoments, RatioIsPMinusOneByQuadrature)
{
    for (int n : {2, 3})
        for (double p : {2.0, 2.5, 3.0, 4.0, 7.0}) {
            const auto [g, gp] = directional_oracle(n, p);
            const auto m = directional_moments(n, p);
            EXPECT_NEAR(gp / g - (p - 1.0), 0.0, 1e-12) << "n=" << n << " p=" << p;
            EXPECT_NEAR(m.gamma_p / g, 1.0, 1e-12);
            EXPECT_NEAR(m.gamma_p_prime / gp, 1.0, 1e-12);
            EXPECT_NEAR(m.gamma_p_prime / m.gamma_p - (p - 1.0), 0.0, 1e-12);
        }
    const auto m1 = directional_moments(1, 3.0);
    EXPECT_NEAR(m1.gamma_p_prime / m1.gamma_p, 2.0, 1e-14);
}

TEST(SphereMoment, Examples)
{
    EXPECT_DOUBLE_EQ(sphere_p_moment(1, 2.0), 2.0);
    EXPECT_NEAR(sphere_p_moment(2, 2.0), 2.0 * pi, 1e-14);
    EXPECT_NEAR(sphere_p_moment(2, 4.0), pi, 1e-14);
    EXPECT_NEAR(sphere_p_moment(3, 2.0), 4.0 * pi, 1e-13);
    for (double p : {2.5, 3.0, 5.0}) {
        const double ref = 4.0 * oracle::finite([p](double t) { return std::pow(std::cos(t), p - 2.0); }, 0.0, 0.5 * pi);
        EXPECT_NEAR(sphere_p_moment(2, p) / ref, 1.0, 1e-12);
    }
}

TEST(LocalPMeanConstants, StatedAndMeasuredCoefficientsDiffer)
{
    // the stated value is nonzero for every p; the p=3 zero of the
    // alternative closed form (p-1)(p-3)/(2p(p+n-2)) is not used
    for (int n : {2, 3})
        for (double p : {2.0, 3.0, 4.0}) {
            EXPECT_NEAR(stated_local_p_mean_constant(n, p), (p - 1.0) / (p * (p + n - 2.0)), 1e-13);
            EXPECT_NEAR(local_p_mean_coefficient(n, p), (p - 1.0) / (2.0 * (p + n - 2.0)), 1e-13);
            EXPECT_GT(stated_local_p_mean_constant(n, p), 0.0);
        }
}

namespace {

struct CapOracle {
    double alpha, beta, mass;
};

CapOracle cap_oracle(double cp, int n)
{
    if (n == 2) {
        const double a = std::acos(cp);
        const double s2 = oracle::smooth([](double t) { return std::sin(t) * std::sin(t); }, -a, a);
        const double c2 = oracle::smooth([](double t) { return std::cos(t) * std::cos(t); }, -a, a);
        return {0.5 * s2, 0.5 * c2 - 0.5 * s2, 2.0 * a};
    }
    // t = w . e1 in [cp, 1]; (w . e2)^2 averages to (1-t^2)/2 over the circle
    const double mass = 2.0 * pi * (1.0 - cp);
    const double e1 = 2.0 * pi * oracle::smooth([](double t) { return t * t; }, cp, 1.0);
    const double e2 = 2.0 * pi * oracle::smooth([](double t) { return 0.5 * (1.0 - t * t); }, cp, 1.0);
    return {0.5 * e2, 0.5 * e1 - 0.5 * e2, mass};
}

} // namespace

TEST(CapMoments, HalfCircleExample)
{
    const CapMoments m = cap_moments(0.0, 2);
    EXPECT_NEAR(m.alpha, pi / 4.0, 1e-14);
    EXPECT_NEAR(m.beta, 0.0, 1e-14);
    EXPECT_NEAR(m.gamma_cap, 1.0 / pi, 1e-14);
}

TEST(CapMoments, MatchIndependentIntegrals)
{
    for (int n : {2, 3})
        for (double cp : {0.0, 0.2, 0.5, 0.9, 0.999}) {
            const CapMoments m = cap_moments(cp, n);
            const CapOracle o = cap_oracle(cp, n);
            EXPECT_NEAR(m.alpha / o.alpha, 1.0, 1e-11) << n << " " << cp;
            EXPECT_NEAR(m.beta, o.beta, 1e-11 * o.alpha);
            EXPECT_NEAR(m.gamma_cap * o.mass, 1.0, 1e-12);
        }
}

TEST(CapMoments, VanishingCapAndErrors)
{
    EXPECT_GT(cap_moments(1.0 - 1e-12, 2).gamma_cap, 1e5);
    EXPECT_THROW(cap_moments(1.0, 2), DomainError);
    EXPECT_THROW(cap_moments(0.5, 1), DomainError);
}

TEST(CapMoments, RatioMonotoneInThreshold)
{
    for (int n : {2, 3}) {
        double prev = -1.0;
        for (int k = 0; k < 2000; ++k) {
            const double c = k / 2000.0;
            const CapMoments m = cap_moments(c, n);
            const double ratio = m.beta / m.alpha;
            EXPECT_GE(ratio, prev - 1e-13) << "n=" << n << " c=" << c;
            prev = ratio;
        }
    }
}

TEST(CapMoments, RotationInvariance)
{
    std::mt19937 gen(7);
    std::normal_distribution<double> normal;
    for (int n : {2, 3})
        for (double cp : {0.0, 0.4, 0.8}) {
            const CapMoments ref = cap_moments(cp, n);
            for (int trial = 0; trial < 5; ++trial) {
                Vec axis(n);
                for (int i = 0; i < n; ++i)
                    axis(i) = normal(gen);
                axis.normalize();
                Vec e2(n);
                if (n == 2)
                    e2 << -axis(1), axis(0);
                else
                    e2 = detail::complete_frame(axis).first;
                const SphereRule cap = cap_rule(n, axis, cp, 256);
                double mass = 0.0, m1 = 0.0, m2 = 0.0;
                for (std::size_t i = 0; i < cap.size(); ++i) {
                    const double a = cap.nodes[i].dot(axis);
                    const double b = cap.nodes[i].dot(e2);
                    mass += cap.weights[i];
                    m1 += cap.weights[i] * a * a;
                    m2 += cap.weights[i] * b * b;
                }
                EXPECT_NEAR(0.5 * m2 / ref.alpha, 1.0, 1e-8);
                EXPECT_NEAR((0.5 * m1 - 0.5 * m2), ref.beta, 1e-8 * ref.alpha);
                EXPECT_NEAR(mass * ref.gamma_cap, 1.0, 1e-8);
            }
        }
}

TEST(CapThreshold, SolvesRatioEquation)
{
    EXPECT_NEAR(solve_cap_threshold(2.0, 2), 0.0, 1e-8);
    EXPECT_NEAR(cap_moments(solve_cap_threshold(2.0, 2), 2).beta, 0.0, 1e-12);
    for (int n : {2, 3})
        for (double p : {2.0, 3.0, 4.0, 10.0}) {
            const double c = solve_cap_threshold(p, n);
            EXPECT_GE(c, 0.0);
            EXPECT_LT(c, 1.0);
            const CapMoments m = cap_moments(c, n);
            EXPECT_LT(std::abs(m.beta / m.alpha - (p - 2.0)), 1e-10) << "n=" << n << " p=" << p;
            const CapOracle o = cap_oracle(c, n);
            EXPECT_LT(std::abs(o.beta / o.alpha - (p - 2.0)), 1e-10) << "independent re-integration";
        }
}

TEST(CapThreshold, RejectsOneDimension)
{
    EXPECT_THROW(solve_cap_threshold(3.0, 1), DomainError);
    EXPECT_THROW(solve_cap_threshold(1.5, 2), DomainError);
}

TEST(ConstantsBundle, InvariantsHold)
{
    const Constants k = Constants::make(2, 0.5, 3.0);
    EXPECT_GT(k.c_ns, 0.0);
    EXPECT_GT(k.c_s, 0.0);
    EXPECT_GT(k.alpha_p, 0.0);
    EXPECT_GT(k.gamma_cap, 0.0);
    EXPECT_NEAR(k.gamma_p_prime / k.gamma_p, 2.0, 1e-12);
    EXPECT_NEAR(k.beta_p / k.alpha_p, 1.0, 1e-10);
    EXPECT_TRUE(k.has_cap);
    EXPECT_FALSE(Constants::make(1, 0.5, 3.0).has_cap);
}
