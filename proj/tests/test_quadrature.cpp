#include "fracmv/quadrature.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <array>

using namespace fracmv;

TEST(GaussJacobi, IntegratesWeightedPolynomials)
{
    for (double b : {-0.25, -0.5, -0.75, -0.9}) {
        const auto rule = gauss_jacobi(16, 0.0, b);
        const double mass = std::pow(2.0, b + 1.0) / (b + 1.0);
        for (int k = 0; k < 20; ++k) {
            double sum = 0.0;
            for (std::size_t i = 0; i < rule->nodes.size(); ++i)
                sum += rule->weights[i] * std::pow(rule->nodes[i], k);
            // in t = 1 + x so the singular endpoint sits at 0 without cancellation
            const double ref = oracle::finite([&](double t) { return std::pow(t, b) * std::pow(t - 1.0, k); }, 0.0, 2.0);
            EXPECT_NEAR(sum, ref, 1e-14 * mass) << "b=" << b << " k=" << k;
        }
    }
}

TEST(GaussJacobi, NearlyNonintegrableWeight)
{
    // b = -0.999: exact mass and first moment
    const double b = -0.999;
    const auto rule = gauss_jacobi(16, 0.0, b);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
        m0 += rule->weights[i];
        m1 += rule->weights[i] * (1.0 + rule->nodes[i]);
    }
    EXPECT_NEAR(m0 / (std::pow(2.0, b + 1.0) / (b + 1.0)), 1.0, 1e-13);
    EXPECT_NEAR(m1 / (std::pow(2.0, b + 2.0) / (b + 2.0)), 1.0, 1e-13);
}

TEST(GaussJacobi, RulesAreMemoized)
{
    const auto a = gauss_jacobi(24, 0.0, -0.3);
    const auto b = gauss_jacobi(24, 0.0, -0.3);
    EXPECT_EQ(a.get(), b.get());
    const auto gl = gauss_legendre(10);
    double sum = 0.0;
    for (std::size_t i = 0; i < gl->nodes.size(); ++i)
        sum += gl->weights[i] * std::pow(gl->nodes[i], 18);
    EXPECT_NEAR(sum, 2.0 / 19.0, 1e-15);
}

TEST(QuadratureSpec, Validation)
{
    QuadratureSpec spec;
    EXPECT_NO_THROW(spec.validate());
    spec.jacobi_nodes = 1;
    EXPECT_THROW(spec.validate(), DomainError);
    spec = {};
    spec.truncation_tol = 0.0;
    EXPECT_THROW(spec.validate(), DomainError);
    spec = {};
    spec.inner_cutoff = -1.0;
    EXPECT_THROW(spec.validate(), DomainError);
    const QuadratureSpec fine = QuadratureSpec{}.refined();
    EXPECT_EQ(fine.jacobi_nodes, 128);
    EXPECT_EQ(fine.smooth_nodes, 256);
}

TEST(TruncationRadius, Examples)
{
    const auto a = truncation_radius(1e-8, 1.0, 1.0);
    EXPECT_NEAR(a.radius, 1e8, 1e-4);
    EXPECT_FALSE(a.capped);
    EXPECT_NEAR(truncation_radius(1e-6, 2.0, 2.0).radius, 1000.0, 1e-9);
    const auto c = truncation_radius(1e-12, 1.0, 0.1, 1e6);
    EXPECT_TRUE(c.capped);
    EXPECT_EQ(c.radius, 1e6);
    EXPECT_THROW(truncation_radius(0.0, 1.0, 1.0), DomainError);
}

TEST(AnnulusIntegral, KernelMassIdentity)
{
    QuadratureSpec spec;
    for (double s : {0.25, 0.5, 0.75})
        for (double r : {0.01, 0.3, 1.0, 5.0}) {
            const double c = std::pow(r, 2.0 * s);
            const double value = annulus_integral([&](double rho) { return c / rho; }, r, s, spec, Decay{c, 1.0});
            EXPECT_NEAR(value, pi / (2.0 * std::sin(pi * s)), 1e-8) << "s=" << s << " r=" << r;
        }
    EXPECT_NEAR(annulus_integral([](double rho) { return std::pow(0.5, 1.0) / rho; }, 0.5, 0.5, spec, Decay{0.5, 1.0}),
        pi / 2.0, 1e-8);
}

TEST(AnnulusIntegral, ZeroIntegrand)
{
    EXPECT_EQ(annulus_integral([](double) { return 0.0; }, 0.2, 0.5, QuadratureSpec{}, Decay{0.0, 1.0}), 0.0);
}

TEST(AnnulusIntegral, MatchesAdaptiveReference)
{
    for (double s : {0.2, 0.6, 0.9})
        for (double r : {0.05, 0.5}) {
            auto g = [](double rho) { return rho / ((1.0 + rho * rho) * (1.0 + rho * rho)); };
            const double value = annulus_integral(g, r, s, QuadratureSpec{}, Decay{1.0, 3.0});
            const double ref = oracle::finite([&](double t) { return g(r + t) * std::pow(t * (2.0 * r + t), -s); }, 0.0, r)
                + oracle::half_line([&](double rho) { return g(rho) * std::pow((rho - r) * (rho + r), -s); }, 2.0 * r);
            // the truncated tail is bounded by truncation_tol in absolute terms
            EXPECT_NEAR(value, ref, 2e-9) << "s=" << s << " r=" << r;
        }
}

TEST(AnnulusIntegral, SelfConvergence)
{
    const QuadratureSpec spec;
    const double inf = std::numeric_limits<double>::infinity();
    // integrand and its oscillation length
    const std::array<std::pair<double (*)(double), double>, 3> integrands = {{
        {[](double rho) { return std::exp(-rho * rho); }, inf},
        {[](double rho) { return rho / ((1.0 + rho * rho) * (1.0 + rho * rho)); }, inf},
        {[](double rho) { return std::cos(rho) / (1.0 + rho * rho); }, 2.0 * pi},
    }};
    for (auto [g, osc] : integrands)
        for (double s : {0.25, 0.75}) {
            const double a = annulus_integral(g, 0.1, s, spec, Decay{1.0, 2.0 - 1e-9}, {}, osc);
            const double b = annulus_integral(g, 0.1, s, spec.refined(), Decay{1.0, 2.0 - 1e-9}, {}, osc);
            EXPECT_LT(std::abs(a - b), 10.0 * spec.truncation_tol);
        }
}

TEST(AnnulusIntegral, RejectsNonconvergentTail)
{
    EXPECT_THROW(annulus_integral([](double) { return 1.0; }, 0.1, 0.25, QuadratureSpec{}, Decay{1.0, 0.0}),
        NumericalError);
    // declared decay violated by the integrand
    EXPECT_THROW(annulus_integral([](double) { return 1.0; }, 0.1, 0.5, QuadratureSpec{}, Decay{1.0, 2.0}),
        NumericalError);
}

TEST(RayIntegral, PiecewiseClosedForm)
{
    const std::array<double, 1> bps = {1.0};
    const double value = ray_pv_integral([](double rho) { return std::min(rho * rho, 1.0); }, 0.75,
        Growth{1.0, 0.0, 0.0}, QuadratureSpec{}, bps);
    EXPECT_NEAR(value, 8.0 / 3.0, 1e-8);
}

TEST(RayIntegral, ZeroIntegrand)
{
    EXPECT_EQ(ray_pv_integral([](double) { return 0.0; }, 0.75, Growth{0.0, 0.0, 0.0}, QuadratureSpec{}), 0.0);
}

TEST(RayIntegral, MatchesAdaptiveReference)
{
    for (double s : {0.6, 0.75, 0.9}) {
        auto h = [](double rho) { return rho * rho * std::exp(-rho); };
        const double value = ray_pv_integral(h, s, Growth{1.0, 0.0, 0.0}, QuadratureSpec{});
        auto f = [s](double t) { return std::pow(t, 1.0 - 2.0 * s) * std::exp(-t); };
        const double ref = oracle::finite(f, 0.0, 1.0) + oracle::half_line(f, 1.0);
        EXPECT_NEAR(value, ref, 1e-7 * std::abs(ref)) << "s=" << s;
        EXPECT_NEAR(value, std::tgamma(2.0 - 2.0 * s), 1e-7 * std::abs(ref));
    }
}

TEST(RayIntegral, SecondOrderTermNearOne)
{
    // h = rho^2 e^{-rho}: h2 = 1; the value is Gamma(2-2s), large as s -> 1
    for (double s : {0.99, 0.999}) {
        auto h = [](double rho) { return rho * rho * std::exp(-rho); };
        const double value = ray_pv_integral(h, s, Growth{1.0, 0.0, 0.0}, QuadratureSpec{}, {}, 1.0,
            std::numeric_limits<double>::infinity(), 1.0);
        EXPECT_NEAR(value / std::tgamma(2.0 - 2.0 * s), 1.0, 1e-8) << "s=" << s;
    }
}

TEST(RayIntegral, LinearInIntegrand)
{
    auto h1 = [](double rho) { return rho * rho * std::exp(-rho); };
    auto h2 = [](double rho) { return std::min(rho * rho, 1.0) * std::cos(0.3 * rho); };
    const double a = -2.5;
    const Growth growth{1.0, 0.0, 0.0};
    const std::array<double, 1> bps = {1.0};
    QuadratureSpec fixed;
    // small enough that no integrand triggers further refinement of eps
    fixed.inner_cutoff = std::ldexp(1.0, -80);
    auto combo = [&](double rho) { return a * h1(rho) + h2(rho); };
    const double lhs = ray_pv_integral(combo, 0.7, growth, fixed, bps);
    const double rhs = a * ray_pv_integral(h1, 0.7, growth, fixed, bps) + ray_pv_integral(h2, 0.7, growth, fixed, bps);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
    // automatic cutoffs adapt to each integrand, so linearity then holds to the tolerance
    QuadratureSpec automatic;
    const double lhs_auto = ray_pv_integral(combo, 0.7, growth, automatic, bps);
    const double rhs_auto = a * ray_pv_integral(h1, 0.7, growth, automatic, bps)
        + ray_pv_integral(h2, 0.7, growth, automatic, bps);
    EXPECT_LT(std::abs(lhs_auto - rhs_auto), 10.0 * automatic.truncation_tol);
}

TEST(RayIntegral, RejectsFirstOrderBehaviour)
{
    EXPECT_THROW(ray_pv_integral([](double rho) { return std::min(rho, 1.0); }, 0.75, Growth{1.0, 0.0, 0.0},
                     QuadratureSpec{}),
        NumericalError);
    EXPECT_THROW(ray_pv_integral([](double rho) { return rho * rho; }, 0.4, Growth{1.0, 0.0, 0.0}, QuadratureSpec{}),
        DomainError);
}

TEST(SphereIntegral, CircleMoments)
{
    QuadratureSpec spec;
    spec.sphere_order = 8;
    EXPECT_NEAR(sphere_integral([](const Vec&) { return 1.0; }, 2, spec), 2.0 * pi, 1e-14);
    EXPECT_NEAR(sphere_integral([](const Vec& w) { return w(0) * w(0); }, 2, spec), pi, 1e-14);
    EXPECT_NEAR(sphere_integral([](const Vec& w) { return w(1) * w(1); }, 2, spec), pi, 1e-14);
    EXPECT_NEAR(sphere_integral([](const Vec& w) { return w(0) * w(1); }, 2, spec), 0.0, 1e-15);
}

TEST(SphereIntegral, Examples)
{
    const QuadratureSpec spec;
    EXPECT_NEAR(sphere_integral([](const Vec& w) { return w(0) * w(0); }, 3, spec), 4.0 * pi / 3.0, 1e-13);
    // kinks at +-pi/2 limit the trapezoid to O(h^2): h^2/6 at order 64
    EXPECT_NEAR(sphere_integral([](const Vec& w) { return std::abs(w(0)); }, 2, spec), 4.0, 2e-3);
    QuadratureSpec fine;
    fine.sphere_order = 1024;
    EXPECT_NEAR(sphere_integral([](const Vec& w) { return std::abs(w(0)); }, 2, fine), 4.0, 1e-5);
    EXPECT_DOUBLE_EQ(sphere_integral([](const Vec& w) { return 3.0 + w(0); }, 1, spec), 6.0);
    EXPECT_NEAR(sphere_integral([](const Vec& w) { return std::exp(w(0) + 0.5 * w(2)); }, 3, spec),
        4.0 * pi * std::sinh(std::sqrt(1.25)) / std::sqrt(1.25), 1e-12);
    EXPECT_THROW(sphere_integral([](const Vec&) { return 1.0; }, 4, spec), DomainError);
}

TEST(SphereIntegral, HemisphereAndCapRules)
{
    for (int n : {1, 2, 3}) {
        const SphereRule full = sphere_rule(n, 32);
        const SphereRule half = hemisphere_rule(n, 32);
        EXPECT_EQ(2 * half.size(), full.size());
        auto even = [](const Vec& w) { return std::exp(w(0) * w(w.size() - 1)) + w.squaredNorm(); };
        EXPECT_NEAR(half.integrate(even), full.integrate(even), 1e-12);
    }
    Vec axis(3);
    axis << 1.0, 2.0, -0.5;
    const SphereRule cap = cap_rule(3, axis, 0.3, 32);
    EXPECT_NEAR(cap.integrate([](const Vec&) { return 1.0; }), 2.0 * pi * 0.7, 1e-12);
    for (const Vec& w : cap.nodes)
        EXPECT_GE(w.dot(axis.normalized()), 0.3 - 1e-14);
}
