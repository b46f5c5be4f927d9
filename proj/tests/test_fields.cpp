#include "fracmv/fields.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fracmv;

namespace {

Vec point(std::initializer_list<double> xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs)
        v(i++) = x;
    return v;
}

std::vector<Vec> random_points(int n, int count, double box, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> uni(-box, box);
    std::vector<Vec> pts;
    for (int k = 0; k < count; ++k) {
        Vec x(n);
        for (int i = 0; i < n; ++i)
            x(i) = uni(gen);
        pts.push_back(x);
    }
    return pts;
}

std::vector<ScalarField> corpus(int n)
{
    Mat H = Mat::Identity(n, n);
    H(0, 0) = -2.0;
    std::vector<ScalarField> fields = {
        make_gaussian(Vec::Constant(n, 0.2), 1.3),
        make_bump(Vec::Zero(n), 2.0),
        make_windowed_poly(H, Vec::Constant(n, 0.5), 0.3, Vec::Zero(n), 1.0, 2.5),
        make_cosine(Vec::LinSpaced(n, 1.0, 2.0)),
        make_affine(Vec::Constant(n, -0.7), 0.4),
        make_constant(n, 2.0),
    };
    fields.push_back(scaled(fields[0], -2.0, 0.5));
    fields.push_back(translated(fields[1], Vec::Constant(n, 0.3)));
    return fields;
}

// Wraps a field and corrupts its gradient.
class BrokenGradient final : public FieldModel {
public:
    explicit BrokenGradient(ScalarField u)
        : u_(std::move(u))
    {
    }
    int dimension() const override { return u_.dimension(); }
    std::string name() const override { return "broken"; }
    std::map<std::string, std::vector<double>> parameters() const override { return {}; }
    double value(const Vec& x) const override { return u_.value(x); }
    Vec gradient(const Vec& x) const override { return 1.01 * u_.gradient(x); }
    Mat hessian(const Vec& x) const override { return u_.hessian(x); }
    double sup_norm() const override { return u_.sup_norm(); }
    double smooth_radius(const Vec& x) const override { return u_.smooth_radius(x); }
    std::optional<Witness> witness(const Vec& x) const override { return u_.witness(x); }

private:
    ScalarField u_;
};

} // namespace

TEST(Gaussian, Examples)
{
    const ScalarField u = make_gaussian(Vec::Zero(2), 1.0);
    EXPECT_DOUBLE_EQ(u.value(Vec::Zero(2)), 1.0);
    EXPECT_EQ(u.gradient(Vec::Zero(2)).norm(), 0.0);
    EXPECT_TRUE(is_critical(u, Vec::Zero(2)));
    EXPECT_NEAR(u.hessian(Vec::Zero(2)).trace(), -4.0, 1e-15);
    EXPECT_DOUBLE_EQ(u.sup_norm(), 1.0);
    EXPECT_THROW(make_gaussian(Vec::Zero(2), 0.0), DomainError);
}

TEST(Corpus, BoundedByNormAtRandomPoints)
{
    for (int n : {1, 2, 3})
        for (const ScalarField& u : corpus(n)) {
            if (u.name() == "affine")
                continue;  // unbounded by construction
            for (const Vec& x : random_points(n, 100, 4.0, 11))
                EXPECT_LE(std::abs(u.value(x)), u.sup_norm() * (1.0 + 1e-15)) << u.name();
        }
}

TEST(Corpus, DerivativesMatchFiniteDifferences)
{
    for (int n : {1, 2, 3})
        for (const ScalarField& u : corpus(n)) {
            const DerivativeReport rep = validate_derivatives(u, random_points(n, 100, 3.0, 5));
            EXPECT_TRUE(rep.pass) << u.name() << " n=" << n << " grad err " << rep.max_gradient_error
                                  << " hess err " << rep.max_hessian_error;
            EXPECT_EQ(rep.points, 100u);
        }
}

TEST(Corpus, RepeatedEvaluationIsBitIdentical)
{
    for (const ScalarField& u : corpus(2))
        for (const Vec& x : random_points(2, 20, 2.0, 3)) {
            const double a = u.value(x);
            const double b = u.value(x);
            EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
            EXPECT_TRUE(u.gradient(x) == u.gradient(x));
            EXPECT_TRUE(u.hessian(x) == u.hessian(x));
        }
}

TEST(Corpus, CorruptedGradientFails)
{
    const ScalarField good = make_gaussian(Vec::Zero(2), 1.0);
    const ScalarField bad(std::make_shared<BrokenGradient>(good));
    const auto pts = random_points(2, 20, 1.5, 9);
    EXPECT_TRUE(validate_derivatives(good, pts).pass);
    EXPECT_FALSE(validate_derivatives(bad, pts).pass);
}

TEST(Cone, ProfileAndGuard)
{
    const double s = 0.75, A = 2.0, B = -0.5;
    const Vec pole = point({0.3, -0.2});
    const ScalarField u = make_cone(A, B, pole, s);
    const Vec at_one = pole + point({0.6, 0.8});
    EXPECT_NEAR(u.value(at_one), A + B, 1e-15);
    for (double d : {0.1, 0.5, 1.0, 4.0}) {
        const Vec x = pole + d * point({0.6, -0.8});
        EXPECT_NEAR(u.gradient(x).norm(), std::abs(A) * (2.0 * s - 1.0) * std::pow(d, 2.0 * s - 2.0), 1e-12);
        EXPECT_NEAR(u.smooth_radius(x), 0.5 * d, 1e-15);
    }
    EXPECT_THROW(u.gradient(pole), DomainError);
    EXPECT_THROW(u.hessian(pole + point({1e-4, 0.0})), DomainError);
    EXPECT_THROW(make_cone(1.0, 0.0, pole, 0.4), DomainError);
}

TEST(Cone, DerivativesNearGuardWithLooserThreshold)
{
    const ScalarField u = make_cone(1.0, 0.0, Vec::Zero(2), 0.6);
    std::vector<Vec> pts;
    for (double d : {0.002, 0.01, 0.05, 0.5, 3.0})
        pts.push_back(d * point({0.8, 0.6}));
    EXPECT_TRUE(validate_derivatives(u, pts, 1e-4, 1e-4).pass);
}

TEST(Bump, SupportAndDerivatives)
{
    const ScalarField u = make_bump(Vec::Zero(2), 1.0);
    EXPECT_EQ(u.value(point({1.0, 0.5})), 0.0);
    EXPECT_EQ(u.gradient(point({1.0, 0.5})).norm(), 0.0);
    EXPECT_NEAR(u.value(Vec::Zero(2)), std::exp(-1.0), 1e-15);
}

TEST(WindowedQuadratic, ReproducesHessianInsideWindow)
{
    Mat H(2, 2);
    H << 1.0, 0.4, 0.4, -3.0;
    const Vec g = point({0.2, -0.1});
    const Vec c = point({1.0, 1.0});
    const ScalarField u = make_windowed_poly(H, g, 0.7, c, 1.0, 2.0);
    EXPECT_NEAR((u.hessian(c) - H).norm(), 0.0, 1e-15);
    EXPECT_NEAR((u.gradient(c) - g).norm(), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(u.value(c), 0.7);
    EXPECT_EQ(u.value(c + point({2.5, 0.0})), 0.0);
}

TEST(Transforms, ScaledAndTranslated)
{
    const ScalarField u = make_gaussian(point({0.1, 0.2}), 0.8);
    const Vec x = point({0.5, -0.3});
    const Vec h = point({0.25, 0.5});
    const ScalarField v = scaled(u, 3.0, -1.0);
    EXPECT_DOUBLE_EQ(v.value(x), 3.0 * u.value(x) - 1.0);
    EXPECT_TRUE(v.gradient(x).isApprox(3.0 * u.gradient(x)));
    const ScalarField t = translated(u, h);
    EXPECT_DOUBLE_EQ(t.value(x + h), u.value(x));
    EXPECT_TRUE(t.hessian(x + h).isApprox(u.hessian(x)));
    EXPECT_DOUBLE_EQ(negated(u).value(x), -u.value(x));
}

TEST(Witness, GapHoldsOnWitnessBall)
{
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const std::vector<ScalarField> fields = {make_gaussian(Vec::Zero(2), 1.0), make_bump(Vec::Zero(2), 1.0),
        make_cone(1.0, 0.0, Vec::Zero(2), 0.75)};
    for (const ScalarField& u : fields) {
        const Vec x = point({0.3, 0.2});
        const auto wit = u.witness(x);
        ASSERT_TRUE(wit.has_value()) << u.name();
        EXPECT_GT(wit->gap, 0.0);
        for (int k = 0; k < 200; ++k) {
            Vec y(2);
            do {
                y << uni(gen), uni(gen);
            } while (y.norm() > 1.0);
            const Vec z = wit->center + wit->radius * y;
            EXPECT_GE(std::abs(u.value(x) - u.value(z)), wit->gap * (1.0 - 1e-12)) << u.name();
        }
    }
    EXPECT_FALSE(make_constant(2, 1.0).witness(Vec::Zero(2)).has_value());
}

TEST(Registry, BuildsNamedFields)
{
    const ScalarField g = make_field("gaussian", 2, {{"center", {0.5, 0.0}}, {"width", {2.0}}});
    EXPECT_DOUBLE_EQ(g.value(point({0.5, 0.0})), 1.0);
    const ScalarField c = make_field("cone", 2, {{"s", {0.75}}});
    EXPECT_NEAR(c.value(point({1.0, 0.0})), 1.0, 1e-15);
    const ScalarField w = make_field("windowed_quadratic", 2, {{"hessian", {1.0, 0.0, 0.0, 2.0}}});
    EXPECT_NEAR(w.hessian(Vec::Zero(2))(1, 1), 2.0, 1e-15);
    for (const FieldEntry& e : field_catalog())
        EXPECT_FALSE(e.name.empty());
}

TEST(Registry, RejectsBadConfigs)
{
    EXPECT_THROW(make_field("nope", 2, {}), ConfigError);
    EXPECT_THROW(make_field("cone", 2, {}), ConfigError);
    EXPECT_THROW(make_field("cosine", 2, {{"wave", {1.0}}}), ConfigError);
    EXPECT_THROW(make_field("gaussian", 4, {}), ConfigError);
}
