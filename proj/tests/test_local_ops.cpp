#include "fracmv/local_ops.hpp"
#include "oracles.hpp"

#include <boost/math/tools/roots.hpp>

#include <gtest/gtest.h>

using namespace fracmv;

namespace {

Vec point(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

// Radial p-Laplacian of f(|x|): |f'|^{p-2} ((p-1) f'' + (n-1) f'/rho).
double radial_p_laplacian(double fp, double fpp, double rho, int n, double p)
{
    return std::pow(std::abs(fp), p - 2.0) * ((p - 1.0) * fpp + (n - 1.0) * fp / rho);
}

ScalarField saddle()
{
    Mat H(2, 2);
    H << 1.0, 0.8, 0.8, -2.0;
    return make_windowed_poly(H, Vec::Zero(2), 0.5, Vec::Zero(2), 1.0, 3.0);
}

// eigenvalues of [[a, b], [b, c]]
std::pair<double, double> eig2(double a, double b, double c)
{
    const double m = 0.5 * (a + c);
    const double d = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return {m - d, m + d};
}

} // namespace

TEST(Variant, Parsing)
{
    EXPECT_EQ(parse_variant("plus"), Variant::plus);
    EXPECT_EQ(parse_variant("-"), Variant::minus);
    EXPECT_EQ(parse_variant("auto"), Variant::automatic);
    EXPECT_THROW(parse_variant("sideways"), ConfigError);
    EXPECT_EQ(opposite(Variant::plus), Variant::minus);
    EXPECT_EQ(opposite(Variant::automatic), Variant::automatic);
}

TEST(PLaplacian, ReducesToLaplacianAtTwo)
{
    const ScalarField u = make_gaussian(point(0.1, 0.0), 0.9);
    const Vec x = point(0.4, -0.3);
    EXPECT_DOUBLE_EQ(p_laplacian(u, x, 2.0), u.hessian(x).trace());
    EXPECT_DOUBLE_EQ(laplacian(u, x), u.hessian(x).trace());
}

TEST(PLaplacian, VanishesOnAffineFields)
{
    const ScalarField u = make_affine(point(1.0, -2.0), 0.3);
    for (double p : {2.0, 3.0, 5.0})
        EXPECT_EQ(p_laplacian(u, point(0.2, 0.7), p), 0.0);
}

TEST(PLaplacian, MatchesRadialFormula)
{
    // u = exp(-rho^2) at rho = 1: f' = -2/e, f'' = 2/e
    const ScalarField u = make_gaussian(Vec::Zero(2), 1.0);
    const double e = std::exp(-1.0);
    for (double p : {2.0, 3.0, 4.5}) {
        const double ref = radial_p_laplacian(-2.0 * e, 2.0 * e, 1.0, 2, p);
        // at p = 2 the value vanishes on the unit circle
        const double tol = 1e-10 * std::max(std::abs(ref), 1.0);
        EXPECT_NEAR(p_laplacian(u, point(1.0, 0.0), p), ref, tol) << p;
        EXPECT_NEAR(p_laplacian(u, point(0.6, 0.8), p), ref, tol) << p;
    }
    EXPECT_NEAR(p_laplacian(u, point(1.0, 0.0), 3.0), 4.0 * e * e, 1e-12);
}

TEST(PLaplacian, RejectsCriticalPointAboveTwo)
{
    const ScalarField u = make_gaussian(Vec::Zero(2), 1.0);
    EXPECT_THROW(p_laplacian(u, Vec::Zero(2), 3.0), DomainError);
    EXPECT_NO_THROW(p_laplacian(u, Vec::Zero(2), 2.0));
}

TEST(NormalizedPLaplacian, CriticalPointUsesExtremeEigenvalues)
{
    const ScalarField u = saddle();
    const auto [lo, hi] = eig2(1.0, 0.8, -2.0);
    const double lap = -1.0;
    for (double p : {2.0, 3.0, 6.0}) {
        EXPECT_NEAR(normalized_p_laplacian(u, Vec::Zero(2), p, Variant::plus), lap + (p - 2.0) * hi, 1e-13);
        EXPECT_NEAR(normalized_p_laplacian(u, Vec::Zero(2), p, Variant::minus), lap + (p - 2.0) * lo, 1e-13);
        EXPECT_NEAR(normalized_p_laplacian(u, Vec::Zero(2), p, Variant::automatic),
            lap + (p - 2.0) * 0.5 * (lo + hi), 1e-13);
    }
    EXPECT_NEAR(infinity_laplacian(u, Vec::Zero(2), Variant::plus), hi, 1e-14);
    EXPECT_NEAR(infinity_laplacian(u, Vec::Zero(2), Variant::minus), lo, 1e-14);
    const ScalarField g = make_gaussian(Vec::Zero(2), 1.0);
    EXPECT_NEAR(normalized_p_laplacian(g, Vec::Zero(2), 4.0, Variant::plus), -4.0 + 2.0 * -2.0, 1e-14);
}

TEST(NormalizedPLaplacian, VariantsCoincideAwayFromCriticalPoints)
{
    const ScalarField u = make_gaussian(point(0.2, 0.1), 1.0);
    const Vec x = point(0.7, -0.4);
    const Vec z = u.gradient(x).normalized();
    const double inf_lap = z.dot(u.hessian(x) * z);
    for (Variant v : {Variant::plus, Variant::minus, Variant::automatic}) {
        EXPECT_EQ(infinity_laplacian(u, x, v), inf_lap);
        EXPECT_EQ(normalized_p_laplacian(u, x, 3.0, v), u.hessian(x).trace() + inf_lap);
    }
}

TEST(LocalPMean, PlainSphereAverageAtTwo)
{
    const ScalarField u = make_gaussian(point(0.3, -0.1), 1.0);
    const Vec x = point(0.5, 0.2);
    const double r = 0.2;
    const double ref = oracle::smooth([&](double t) { return u.value(x - r * point(std::cos(t), std::sin(t))); }, 0.0,
                           2.0 * pi)
        / (2.0 * pi);
    EXPECT_NEAR(local_p_mean(u, x, r, 2.0), ref, 1e-13);
}

TEST(LocalPMean, MatchesWeightedAverageOracle)
{
    const ScalarField u = make_gaussian(point(0.3, -0.1), 1.0);
    const Vec x = point(0.5, 0.2);
    const double r = 0.2;
    for (double p : {3.0, 4.0}) {
        // the weight |u(x) - u(x - r w)|^{p-2} has kinks; locate them and integrate between
        auto at = [&](double t) { return Vec(x - r * point(std::cos(t), std::sin(t))); };
        auto F = [&](double t) { return u.value(x) - u.value(at(t)); };
        auto w = [&](double t) { return std::pow(std::abs(F(t)), p - 2.0); };
        auto wu = [&](double t) { return w(t) * u.value(at(t)); };
        const Vec g = u.gradient(x);
        const double t0 = std::atan2(g(1), g(0));  // F > 0 here, F < 0 at t0 + pi
        auto root = [&](double lo, double hi) {
            std::uintmax_t it = 200;
            const auto br = boost::math::tools::toms748_solve(F, lo, hi, boost::math::tools::eps_tolerance<double>(52), it);
            return 0.5 * (br.first + br.second);
        };
        const double k1 = root(t0, t0 + pi);
        const double k2 = root(t0 + pi, t0 + 2.0 * pi);
        const double num = oracle::finite(wu, k1, k2) + oracle::finite(wu, k2, k1 + 2.0 * pi);
        const double den = oracle::finite(w, k1, k2) + oracle::finite(w, k2, k1 + 2.0 * pi);
        const double ref = num / den;
        EXPECT_NEAR(local_p_mean(u, x, r, p), ref, 1e-12) << p;
    }
}

TEST(LocalPMean, ConstantFieldIsDegenerate)
{
    EXPECT_THROW(local_p_mean(make_constant(2, 1.0), Vec::Zero(2), 0.1, 3.0), DomainError);
}

TEST(LocalMeans, ShiftInvariance)
{
    const ScalarField u = make_gaussian(point(0.3, -0.1), 1.0);
    const ScalarField v = scaled(u, 1.0, 2.75);
    const Vec x = point(0.5, 0.2);
    const double r = 0.15;
    for (double p : {2.0, 3.0, 4.0}) {
        EXPECT_NEAR(local_p_mean(v, x, r, p), local_p_mean(u, x, r, p) + 2.75, 1e-12);
        EXPECT_NEAR(local_grad_p_mean(v, x, r, p), local_grad_p_mean(u, x, r, p) + 2.75, 1e-12);
    }
    EXPECT_NEAR(local_infinity_mean(v, x, r), local_infinity_mean(u, x, r) + 2.75, 1e-12);
}

TEST(LocalPMean, PositiveHomogeneity)
{
    const ScalarField u = make_gaussian(point(0.3, -0.1), 1.0);
    const Vec x = point(0.5, 0.2);
    for (double lambda : {0.3, 4.0})
        for (double p : {3.0, 5.0}) {
            const double a = local_p_mean(scaled(u, lambda), x, 0.1, p);
            const double b = lambda * local_p_mean(u, x, 0.1, p);
            EXPECT_NEAR(a, b, 1e-12 * std::abs(b));
        }
}

TEST(LocalPMean, RadiusMustStayInsideSmoothBall)
{
    const ScalarField u = make_gaussian(Vec::Zero(2), 1.0);
    EXPECT_THROW(local_p_mean(u, point(0.5, 0.0), 0.5, 3.0), DomainError);
    EXPECT_THROW(local_p_mean(u, point(0.5, 0.0), 0.0, 3.0), DomainError);
}

TEST(LocalGradPMean, ConstantsAndAffineFields)
{
    for (int n : {2, 3}) {
        const Vec x = Vec::Constant(n, 0.1);
        for (double p : {2.0, 3.0, 4.0}) {
            EXPECT_NEAR(local_grad_p_mean(make_constant(n, -1.5), x, 0.2, p), -1.5, 1e-13);
            const ScalarField a = make_affine(Vec::LinSpaced(n, 1.0, -1.0), 0.25);
            EXPECT_NEAR(local_grad_p_mean(a, x, 0.2, p), a.value(x), 1e-13);
            EXPECT_NEAR(local_infinity_mean(a, x, 0.2), a.value(x), 1e-14);
        }
    }
    EXPECT_THROW(local_grad_p_mean(make_gaussian(Vec::Zero(1), 1.0), Vec::Constant(1, 0.3), 0.1, 3.0), DomainError);
}

TEST(LocalGradPMean, MatchesCapAverageOracle)
{
    const ScalarField u = make_gaussian(point(0.3, -0.1), 1.0);
    const Vec x = point(0.5, 0.2);
    const double r = 0.2;
    for (double p : {2.0, 3.0, 4.0}) {
        const double cp = solve_cap_threshold(p, 2);
        const double a = std::acos(cp);
        const Vec g = u.gradient(x);
        const double t0 = std::atan2(g(1), g(0));
        auto f = [&](double t) {
            const Vec w = point(std::cos(t0 + t), std::sin(t0 + t));
            return u.value(x + r * w) + u.value(x - r * w);
        };
        const double ref = oracle::smooth(f, -a, a) / (2.0 * a) / 2.0;
        EXPECT_NEAR(local_grad_p_mean(u, x, r, p), ref, 1e-13) << p;
    }
}

TEST(LocalGradPMean, HalfCircleCapIgnoresDirectionSign)
{
    // p = 2, n = 2: c_2 = 0, the cap is a half circle and the symmetrized sum
    // is even, so the mean of -u is minus the mean of u
    const ScalarField u = make_gaussian(point(0.3, -0.1), 1.0);
    const Vec x = point(0.5, 0.2);
    EXPECT_NEAR(local_grad_p_mean(negated(u), x, 0.2, 2.0), -local_grad_p_mean(u, x, 0.2, 2.0), 1e-12);
    EXPECT_NEAR(local_grad_p_mean(u, x, 0.2, 2.0), local_p_mean(u, x, 0.2, 2.0), 1e-12);
}

TEST(LocalGradPMean, CriticalPointVariantsBracket)
{
    const ScalarField u = saddle();
    const double plus = local_grad_p_mean(u, Vec::Zero(2), 0.2, 4.0, Variant::plus);
    const double minus = local_grad_p_mean(u, Vec::Zero(2), 0.2, 4.0, Variant::minus);
    const double mid = local_grad_p_mean(u, Vec::Zero(2), 0.2, 4.0, Variant::automatic);
    EXPECT_GT(plus, minus);
    EXPECT_NEAR(mid, 0.5 * (plus + minus), 1e-14);
    // quadratic field: M - u(x) = (gamma_cap r^2 / 2) (alpha tr H + beta <H xi, xi>), extremal at eigenvectors
    const double cp = solve_cap_threshold(4.0, 2);
    const CapMoments cm = cap_moments(cp, 2);
    const auto [lo, hi] = eig2(1.0, 0.8, -2.0);
    const double base = 0.5 + cm.gamma_cap * 0.04 * (cm.alpha * -1.0);
    EXPECT_NEAR(plus, base + cm.gamma_cap * 0.04 * cm.beta * hi, 1e-9);
    EXPECT_NEAR(minus, base + cm.gamma_cap * 0.04 * cm.beta * lo, 1e-9);
}

TEST(LocalInfinityMean, TwoPointAverage)
{
    const ScalarField u = make_gaussian(point(0.3, -0.1), 1.0);
    const Vec x = point(0.5, 0.2);
    const Vec z = u.gradient(x).normalized();
    const double r = 0.1;
    EXPECT_NEAR(local_infinity_mean(u, x, r), 0.5 * (u.value(x + r * z) + u.value(x - r * z)), 1e-15);
}

TEST(LocalInfinityMean, MidrangeAtCriticalPoints)
{
    // saddle: u - 0.5 = (1/2) w^T H w r^2 on the circle, extremes at eigenvalues
    const ScalarField u = saddle();
    const auto [lo, hi] = eig2(1.0, 0.8, -2.0);
    const double r = 0.2;
    const double expected = 0.5 + 0.25 * r * r * (lo + hi);
    for (Variant v : {Variant::plus, Variant::minus, Variant::automatic})
        EXPECT_NEAR(local_infinity_mean(u, Vec::Zero(2), r, v), expected, 1e-10);
}
