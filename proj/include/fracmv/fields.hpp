#ifndef FRACMV_FIELDS_HPP
#define FRACMV_FIELDS_HPP

#include "fracmv/core.hpp"
#include "fracmv/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fracmv {

/// A point z and radius r with |u(x) - u(y)| >= gap on B_r(z): certifies that
/// the weight integral of the (s,p)-kernel stays away from zero.
struct Witness {
    Vec center;
    double radius = 0.0;
    double gap = 0.0;
};

/// u(x + y) == level, exactly in floating point, for |y| >= radius.
struct FarField {
    double level = 0.0;
    double radius = 0.0;
};

/// Abstract field model. Implementations are immutable.
class FieldModel {
public:
    virtual ~FieldModel() = default;

    virtual int dimension() const = 0;
    virtual std::string name() const = 0;
    virtual std::map<std::string, std::vector<double>> parameters() const = 0;

    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual Mat hessian(const Vec& x) const = 0;
    /// u(x + y) - u(x). Models override this when they can avoid the
    /// cancellation of subtracting two values.
    virtual double increment(const Vec& x, const Vec& y) const { return value(x + y) - value(x); }

    /// Bound on |u|; for unbounded fields the bound over the declared box.
    virtual double sup_norm() const = 0;
    /// Radius of a ball around x on which u is C^2 with derivatives of the
    /// size the quadrature assumes.
    virtual double smooth_radius(const Vec& x) const = 0;
    virtual std::optional<Witness> witness(const Vec& x) const = 0;

    /// |u(x + y)| <= constant + coefficient |y|^exponent for all y.
    virtual Growth growth(const Vec&) const { return {sup_norm(), 0.0, 0.0}; }
    virtual double oscillation_length() const { return std::numeric_limits<double>::infinity(); }
    /// Set when the field is constant outside a ball about x; the exterior
    /// integrals then get their tails in closed form instead of truncating.
    virtual std::optional<FarField> far_field(const Vec&) const { return std::nullopt; }
    /// Set when u(x) depends on x only through x . k; ray integrals then
    /// lose smoothness in the direction across k's normal.
    virtual std::optional<Vec> ridge_normal() const { return std::nullopt; }
    /// Distances rho > 0 at which rho -> u(x + rho dir) loses smoothness.
    virtual std::vector<double> ray_breakpoints(const Vec&, const Vec&) const { return {}; }
};

/// Value handle over a shared immutable model.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(std::shared_ptr<const FieldModel> model)
        : model_(std::move(model))
    {
    }

    int dimension() const { return model_->dimension(); }
    std::string name() const { return model_->name(); }
    std::map<std::string, std::vector<double>> parameters() const { return model_->parameters(); }

    double value(const Vec& x) const { return model_->value(x); }
    double operator()(const Vec& x) const { return model_->value(x); }
    double increment(const Vec& x, const Vec& y) const { return model_->increment(x, y); }
    Vec gradient(const Vec& x) const { return model_->gradient(x); }
    Mat hessian(const Vec& x) const { return model_->hessian(x); }
    double sup_norm() const { return model_->sup_norm(); }
    double smooth_radius(const Vec& x) const { return model_->smooth_radius(x); }
    std::optional<Witness> witness(const Vec& x) const { return model_->witness(x); }
    Growth growth(const Vec& x) const { return model_->growth(x); }
    std::optional<FarField> far_field(const Vec& x) const { return model_->far_field(x); }
    std::optional<Vec> ridge_normal() const { return model_->ridge_normal(); }
    double oscillation_length() const { return model_->oscillation_length(); }
    std::vector<double> ray_breakpoints(const Vec& x, const Vec& dir) const
    {
        return model_->ray_breakpoints(x, dir);
    }

    const std::shared_ptr<const FieldModel>& model() const { return model_; }
    explicit operator bool() const { return static_cast<bool>(model_); }

private:
    std::shared_ptr<const FieldModel> model_;
};

inline constexpr double critical_gradient_threshold = 1e-10;

/// |grad u(x)| < 1e-10 (1 + sup_norm).
inline bool is_critical(const ScalarField& u, const Vec& x)
{
    return u.gradient(x).norm() < critical_gradient_threshold * (1.0 + u.sup_norm());
}

inline void require_point(const ScalarField& u, const Vec& x)
{
    require(static_cast<bool>(u), "field handle is empty");
    require(x.size() == u.dimension(),
        "point dimension " + std::to_string(x.size()) + " does not match field dimension "
            + std::to_string(u.dimension()));
}

namespace detail {

inline Vec unit_or_default(const Vec& v)
{
    const double norm = v.norm();
    if (norm > 0.0)
        return v / norm;
    Vec e = Vec::Zero(v.size());
    e(0) = 1.0;
    return e;
}

inline std::vector<double> to_list(const Vec& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

class Gaussian final : public FieldModel {
public:
    Gaussian(Vec center, double width)
        : c_(std::move(center))
        , w_(width)
    {
        require_dimension(static_cast<int>(c_.size()));
        require(width > 0.0, "gaussian width must be positive");
    }

    int dimension() const override { return static_cast<int>(c_.size()); }
    std::string name() const override { return "gaussian"; }
    std::map<std::string, std::vector<double>> parameters() const override
    {
        return {{"center", to_list(c_)}, {"width", {w_}}};
    }

    double value(const Vec& x) const override { return std::exp(-(x - c_).squaredNorm() / (w_ * w_)); }
    double increment(const Vec& x, const Vec& y) const override
    {
        // |x+y-c|^2 - |x-c|^2 = (2(x-c) + y).y
        return value(x) * std::expm1(-(2.0 * (x - c_) + y).dot(y) / (w_ * w_));
    }
    Vec gradient(const Vec& x) const override
    {
        const Vec d = x - c_;
        return (-2.0 / (w_ * w_)) * value(x) * d;
    }
    Mat hessian(const Vec& x) const override
    {
        const Vec d = x - c_;
        const double w2 = w_ * w_;
        const int n = dimension();
        return value(x) * (4.0 / (w2 * w2) * d * d.transpose() - (2.0 / w2) * Mat::Identity(n, n));
    }
    double sup_norm() const override { return 1.0; }
    double smooth_radius(const Vec&) const override { return w_; }
    std::optional<FarField> far_field(const Vec& x) const override
    {
        // exp(-q) underflows to exactly 0 once q >= 746
        return FarField{0.0, (x - c_).norm() + 27.4 * w_};
    }
    std::optional<Witness> witness(const Vec& x) const override
    {
        const Vec d = x - c_;
        const Vec dir = unit_or_default(d);
        const double dist = d.norm();
        Witness wit;
        wit.center = c_ + (dist + 2.0 * w_) * dir;
        wit.radius = 0.5 * w_;
        // B_r(z) lies outside the ball of radius dist + 1.5 w about the center
        const double far = dist + 1.5 * w_;
        wit.gap = value(x) - std::exp(-far * far / (w_ * w_));
        return wit;
    }

private:
    Vec c_;
    double w_;
};

class Cone final : public FieldModel {
public:
    Cone(double amplitude, double offset, Vec pole, double s, double guard, double box)
        : a_(amplitude)
        , b_(offset)
        , x0_(std::move(pole))
        , s_(s)
        , gamma_(2.0 * s - 1.0)
        , guard_(guard)
        , box_(box)
    {
        require_dimension(static_cast<int>(x0_.size()));
        require_upper_order(s);
        require(guard > 0.0, "cone guard radius must be positive");
        require(box > 0.0, "cone bounding box must be positive");
    }

    int dimension() const override { return static_cast<int>(x0_.size()); }
    std::string name() const override { return "cone"; }
    std::map<std::string, std::vector<double>> parameters() const override
    {
        return {{"amplitude", {a_}}, {"offset", {b_}}, {"pole", to_list(x0_)}, {"s", {s_}},
            {"guard", {guard_}}, {"box", {box_}}};
    }

    double value(const Vec& x) const override
    {
        const double d = (x - x0_).norm();
        return a_ * std::pow(d, gamma_) + b_;
    }
    Vec gradient(const Vec& x) const override
    {
        const Vec v = x - x0_;
        const double d = guarded_distance(v);
        return a_ * gamma_ * std::pow(d, gamma_ - 2.0) * v;
    }
    Mat hessian(const Vec& x) const override
    {
        const Vec v = x - x0_;
        const double d = guarded_distance(v);
        const Vec e = v / d;
        const int n = dimension();
        return a_ * gamma_ * std::pow(d, gamma_ - 2.0)
            * (Mat::Identity(n, n) + (gamma_ - 2.0) * e * e.transpose());
    }
    double sup_norm() const override { return std::abs(a_) * std::pow(box_, gamma_) + std::abs(b_); }
    double smooth_radius(const Vec& x) const override { return 0.5 * guarded_distance(x - x0_); }
    std::optional<Witness> witness(const Vec& x) const override
    {
        if (a_ == 0.0)
            return std::nullopt;
        const Vec v = x - x0_;
        const double d = v.norm();
        const Vec dir = unit_or_default(v);
        // the profile is monotone in |y - x0|; compare against a ball twice as far out
        Witness wit;
        wit.radius = 0.25 * std::max(d, guard_);
        wit.center = x0_ + (2.0 * d + 2.0 * wit.radius + guard_) * dir;
        const double near = 2.0 * d + wit.radius + guard_;
        wit.gap = std::abs(a_) * (std::pow(near, gamma_) - std::pow(d, gamma_));
        return wit;
    }
    Growth growth(const Vec& x) const override
    {
        // |x - x0 + y|^g <= d^g + |y|^g for 0 < g < 1
        const double d = (x - x0_).norm();
        return {std::abs(b_) + std::abs(a_) * std::pow(d, gamma_), std::abs(a_), gamma_};
    }
    std::vector<double> ray_breakpoints(const Vec& x, const Vec& dir) const override
    {
        const Vec v = x0_ - x;
        const double t = v.dot(dir);
        if (t <= 0.0)
            return {};
        const double miss = (v - t * dir).norm();
        if (miss < 0.5 * t)
            return {t};
        return {};
    }

private:
    double guarded_distance(const Vec& v) const
    {
        const double d = v.norm();
        if (!(d > guard_)) {
            std::ostringstream msg;
            msg << "cone derivatives requested inside the guard ball: |x - pole| = " << d
                << " <= " << guard_;
            throw DomainError(msg.str());
        }
        return d;
    }

    double a_, b_;
    Vec x0_;
    double s_, gamma_, guard_, box_;
};

class Bump final : public FieldModel {
public:
    Bump(Vec center, double radius)
        : c_(std::move(center))
        , R_(radius)
    {
        require_dimension(static_cast<int>(c_.size()));
        require(radius > 0.0, "bump radius must be positive");
    }

    int dimension() const override { return static_cast<int>(c_.size()); }
    std::string name() const override { return "bump"; }
    std::map<std::string, std::vector<double>> parameters() const override
    {
        return {{"center", to_list(c_)}, {"radius", {R_}}};
    }

    double value(const Vec& x) const override
    {
        const double q = (x - c_).squaredNorm() / (R_ * R_);
        return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
    }
    Vec gradient(const Vec& x) const override
    {
        const Vec d = x - c_;
        const double q = d.squaredNorm() / (R_ * R_);
        if (!(q < 1.0))
            return Vec::Zero(dimension());
        const double m = 1.0 - q;
        const double f1 = -std::exp(-1.0 / m) / (m * m);
        return f1 * (2.0 / (R_ * R_)) * d;
    }
    Mat hessian(const Vec& x) const override
    {
        const Vec d = x - c_;
        const int n = dimension();
        const double q = d.squaredNorm() / (R_ * R_);
        if (!(q < 1.0))
            return Mat::Zero(n, n);
        const double m = 1.0 - q;
        const double f = std::exp(-1.0 / m);
        const double f1 = -f / (m * m);
        const double f2 = f / (m * m * m * m) - 2.0 * f / (m * m * m);
        const Vec dq = (2.0 / (R_ * R_)) * d;
        return f2 * dq * dq.transpose() + f1 * (2.0 / (R_ * R_)) * Mat::Identity(n, n);
    }
    double sup_norm() const override { return std::exp(-1.0); }
    std::optional<FarField> far_field(const Vec& x) const override { return FarField{0.0, (x - c_).norm() + R_}; }
    /// R/4 in the interior. Near the edge of the support exp(-1/m) varies on
    /// the scale m^2 R/2, and just outside it the distance to the support
    /// bounds the flat region; both are floored at R/1000.
    double smooth_radius(const Vec& x) const override
    {
        const double d = (x - c_).norm();
        const double m = 1.0 - (d / R_) * (d / R_);
        const double local = m > 0.0 ? 2.0 * R_ * m * m : d - R_;
        return std::clamp(local, 1e-3 * R_, 0.25 * R_);
    }
    std::optional<Witness> witness(const Vec& x) const override
    {
        const double ux = value(x);
        Witness wit;
        if (ux > 0.0) {
            wit.center = c_ + 2.0 * R_ * unit_or_default(x - c_);
            wit.radius = 0.5 * R_;
            wit.gap = ux;
        } else {
            wit.center = c_;
            wit.radius = 0.25 * R_;
            wit.gap = std::exp(-1.0 / (1.0 - 1.0 / 16.0));
        }
        return wit;
    }

private:
    Vec c_;
    double R_;
};

/// Smooth step 1 on [0,a], 0 on [b,inf), with its first two derivatives.
struct RadialStep {
    double a, b;

    static double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
    static double psi1(double t) { return t > 0.0 ? psi(t) / (t * t) : 0.0; }
    static double psi2(double t) { return t > 0.0 ? psi(t) * (1.0 / (t * t * t * t) - 2.0 / (t * t * t)) : 0.0; }

    std::array<double, 3> operator()(double t) const
    {
        if (t <= a)
            return {1.0, 0.0, 0.0};
        if (t >= b)
            return {0.0, 0.0, 0.0};
        const double A = psi(b - t), B = psi(t - a);
        const double A1 = -psi1(b - t), B1 = psi1(t - a);
        const double A2 = psi2(b - t), B2 = psi2(t - a);
        const double sum = A + B;
        const double num = A1 * B - A * B1;
        const double s0 = A / sum;
        const double s1 = num / (sum * sum);
        const double s2 = (A2 * B - A * B2) / (sum * sum) - 2.0 * num * (A1 + B1) / (sum * sum * sum);
        return {s0, s1, s2};
    }
};

/// (c + g.(x-x_c) + (x-x_c)^T H (x-x_c) / 2) times a smooth radial window.
class WindowedQuadratic final : public FieldModel {
public:
    WindowedQuadratic(Mat hessian, Vec gradient, double constant, Vec center, double inner, double outer)
        : H_(std::move(hessian))
        , g_(std::move(gradient))
        , c_(constant)
        , xc_(std::move(center))
        , step_{inner, outer}
    {
        const int n = static_cast<int>(xc_.size());
        require_dimension(n);
        require(H_.rows() == n && H_.cols() == n, "windowed quadratic Hessian must be n x n");
        require(g_.size() == n, "windowed quadratic gradient must have n entries");
        require((H_ - H_.transpose()).norm() <= 1e-14 * (1.0 + H_.norm()), "windowed quadratic Hessian must be symmetric");
        require(inner > 0.0 && outer > inner, "window radii must satisfy 0 < inner < outer");
    }

    int dimension() const override { return static_cast<int>(xc_.size()); }
    std::string name() const override { return "windowed_quadratic"; }
    std::map<std::string, std::vector<double>> parameters() const override
    {
        return {{"hessian", std::vector<double>(H_.data(), H_.data() + H_.size())}, {"gradient", to_list(g_)},
            {"constant", {c_}}, {"center", to_list(xc_)}, {"inner", {step_.a}}, {"outer", {step_.b}}};
    }

    double value(const Vec& x) const override
    {
        const Vec d = x - xc_;
        return poly(d) * step_(d.norm())[0];
    }
    Vec gradient(const Vec& x) const override
    {
        const Vec d = x - xc_;
        const double t = d.norm();
        const auto w = step_(t);
        const Vec gp = g_ + H_ * d;
        Vec grad = w[0] * gp;
        if (w[1] != 0.0)
            grad += poly(d) * w[1] * (d / t);
        return grad;
    }
    Mat hessian(const Vec& x) const override
    {
        const Vec d = x - xc_;
        const double t = d.norm();
        const auto w = step_(t);
        Mat hess = w[0] * H_;
        if (w[1] != 0.0 || w[2] != 0.0) {
            const int n = dimension();
            const Vec e = d / t;
            const Vec gp = g_ + H_ * d;
            const Vec gw = w[1] * e;
            const Mat hw = w[2] * e * e.transpose() + (w[1] / t) * (Mat::Identity(n, n) - e * e.transpose());
            hess += gp * gw.transpose() + gw * gp.transpose() + poly(d) * hw;
        }
        return hess;
    }
    double sup_norm() const override
    {
        const double b = step_.b;
        return std::abs(c_) + g_.norm() * b + 0.5 * H_.norm() * b * b;
    }
    double smooth_radius(const Vec& x) const override
    {
        const double t = (x - xc_).norm();
        return std::max(step_.a - t, 0.125 * (step_.b - step_.a));
    }
    std::optional<FarField> far_field(const Vec& x) const override
    {
        return FarField{0.0, (x - xc_).norm() + step_.b};
    }
    std::optional<Witness> witness(const Vec& x) const override
    {
        const double ux = value(x);
        Witness wit;
        const Vec dir = unit_or_default(x - xc_);
        if (ux != 0.0) {
            // outside the window the field vanishes
            wit.center = xc_ + (step_.b + 1.0 + (x - xc_).norm()) * dir;
            wit.radius = 0.5;
            wit.gap = std::abs(ux);
            return wit;
        }
        // u(x) = 0: look for a point of the window where the quadratic is nonzero
        Vec z = xc_;
        if (std::abs(poly(Vec::Zero(dimension()))) < 1e-3) {
            const double probe = 0.5 * step_.a;
            Vec best = xc_;
            double best_val = 0.0;
            for (int i = 0; i < dimension(); ++i) {
                for (double sgn : {-1.0, 1.0}) {
                    Vec cand = xc_;
                    cand(i) += sgn * probe;
                    if (std::abs(value(cand)) > best_val) {
                        best_val = std::abs(value(cand));
                        best = cand;
                    }
                }
            }
            z = best;
        }
        const double v = std::abs(value(z));
        if (v == 0.0)
            return std::nullopt;
        // Lipschitz control of the quadratic inside the window
        const double lip = g_.norm() + H_.norm() * step_.a;
        const double rad = std::min(0.25 * step_.a, 0.5 * v / std::max(lip, 1e-300));
        wit.center = z;
        wit.radius = rad;
        wit.gap = v - lip * rad;
        return wit;
    }

private:
    double poly(const Vec& d) const { return c_ + g_.dot(d) + 0.5 * d.dot(H_ * d); }

    Mat H_;
    Vec g_;
    double c_;
    Vec xc_;
    RadialStep step_;
};

class Cosine final : public FieldModel {
public:
    explicit Cosine(Vec wave)
        : k_(std::move(wave))
    {
        require_dimension(static_cast<int>(k_.size()));
        require(k_.norm() > 0.0, "cosine wave vector must be nonzero");
    }

    int dimension() const override { return static_cast<int>(k_.size()); }
    std::string name() const override { return "cosine"; }
    std::map<std::string, std::vector<double>> parameters() const override { return {{"wave", to_list(k_)}}; }

    double value(const Vec& x) const override { return std::cos(k_.dot(x)); }
    Vec gradient(const Vec& x) const override { return -std::sin(k_.dot(x)) * k_; }
    Mat hessian(const Vec& x) const override { return -std::cos(k_.dot(x)) * k_ * k_.transpose(); }
    double sup_norm() const override { return 1.0; }
    double smooth_radius(const Vec&) const override { return 1.0 / k_.norm(); }
    double oscillation_length() const override { return 2.0 * pi / k_.norm(); }
    std::optional<Vec> ridge_normal() const override { return k_; }
    std::optional<Witness> witness(const Vec& x) const override
    {
        const double kk = k_.norm();
        const double phase = k_.dot(x);
        // nearest phase where cos = +1 (if u(x) <= 0) or -1 (otherwise)
        const double target = value(x) <= 0.0 ? 2.0 * pi * std::ceil(phase / (2.0 * pi))
                                              : pi * (2.0 * std::ceil((phase - pi) / (2.0 * pi)) + 1.0);
        Witness wit;
        wit.center = x + ((target - phase) / (kk * kk)) * k_;
        wit.radius = pi / (3.0 * kk);
        wit.gap = std::abs(value(x)) + 0.5;
        return wit;
    }

private:
    Vec k_;
};

class Affine final : public FieldModel {
public:
    Affine(Vec slope, double constant)
        : g_(std::move(slope))
        , c_(constant)
    {
        require_dimension(static_cast<int>(g_.size()));
    }

    int dimension() const override { return static_cast<int>(g_.size()); }
    std::string name() const override { return g_.norm() == 0.0 ? "constant" : "affine"; }
    std::map<std::string, std::vector<double>> parameters() const override
    {
        return {{"slope", to_list(g_)}, {"constant", {c_}}};
    }

    double value(const Vec& x) const override { return g_.dot(x) + c_; }
    double increment(const Vec&, const Vec& y) const override { return g_.dot(y); }
    Vec gradient(const Vec&) const override { return g_; }
    Mat hessian(const Vec&) const override { return Mat::Zero(dimension(), dimension()); }
    double sup_norm() const override { return std::abs(c_) + g_.norm(); }
    double smooth_radius(const Vec&) const override { return 1.0; }
    std::optional<FarField> far_field(const Vec&) const override
    {
        if (g_.norm() != 0.0)
            return std::nullopt;
        return FarField{c_, 0.0};
    }
    std::optional<Vec> ridge_normal() const override
    {
        if (g_.norm() == 0.0)
            return std::nullopt;
        return g_;
    }
    std::optional<Witness> witness(const Vec& x) const override
    {
        const double gn = g_.norm();
        if (gn == 0.0)
            return std::nullopt;
        Witness wit;
        wit.center = x + 2.0 * g_ / gn;
        wit.radius = 1.0;
        wit.gap = gn;
        return wit;
    }
    Growth growth(const Vec& x) const override
    {
        if (g_.norm() == 0.0)
            return {std::abs(c_), 0.0, 0.0};
        return {std::abs(value(x)), g_.norm(), 1.0};
    }

private:
    Vec g_;
    double c_;
};

/// lambda * u + c
class Scaled final : public FieldModel {
public:
    Scaled(ScalarField base, double lambda, double shift)
        : u_(std::move(base))
        , l_(lambda)
        , c_(shift)
    {
    }

    int dimension() const override { return u_.dimension(); }
    std::string name() const override { return u_.name(); }
    std::map<std::string, std::vector<double>> parameters() const override
    {
        auto p = u_.parameters();
        p["scale"] = {l_};
        p["shift"] = {c_};
        return p;
    }

    double value(const Vec& x) const override { return l_ * u_.value(x) + c_; }
    double increment(const Vec& x, const Vec& y) const override { return l_ * u_.increment(x, y); }
    Vec gradient(const Vec& x) const override { return l_ * u_.gradient(x); }
    Mat hessian(const Vec& x) const override { return l_ * u_.hessian(x); }
    double sup_norm() const override { return std::abs(l_) * u_.sup_norm() + std::abs(c_); }
    double smooth_radius(const Vec& x) const override { return u_.smooth_radius(x); }
    std::optional<Witness> witness(const Vec& x) const override
    {
        auto w = u_.witness(x);
        if (!w || l_ == 0.0)
            return std::nullopt;
        w->gap *= std::abs(l_);
        return w;
    }
    Growth growth(const Vec& x) const override
    {
        const Growth g = u_.growth(x);
        return {std::abs(l_) * g.constant + std::abs(c_), std::abs(l_) * g.coefficient, g.exponent};
    }
    double oscillation_length() const override { return u_.oscillation_length(); }
    std::vector<double> ray_breakpoints(const Vec& x, const Vec& dir) const override
    {
        return u_.ray_breakpoints(x, dir);
    }
    std::optional<FarField> far_field(const Vec& x) const override
    {
        auto f = u_.far_field(x);
        if (f)
            f->level = l_ * f->level + c_;  // the same expression as value()
        return f;
    }
    std::optional<Vec> ridge_normal() const override { return u_.ridge_normal(); }

private:
    ScalarField u_;
    double l_, c_;
};

/// x -> u(x - h)
class Translated final : public FieldModel {
public:
    Translated(ScalarField base, Vec shift)
        : u_(std::move(base))
        , h_(std::move(shift))
    {
        require(h_.size() == u_.dimension(), "translation dimension mismatch");
    }

    int dimension() const override { return u_.dimension(); }
    std::string name() const override { return u_.name(); }
    std::map<std::string, std::vector<double>> parameters() const override
    {
        auto p = u_.parameters();
        p["translation"] = to_list(h_);
        return p;
    }

    double value(const Vec& x) const override { return u_.value(x - h_); }
    double increment(const Vec& x, const Vec& y) const override { return u_.increment(x - h_, y); }
    Vec gradient(const Vec& x) const override { return u_.gradient(x - h_); }
    Mat hessian(const Vec& x) const override { return u_.hessian(x - h_); }
    double sup_norm() const override { return u_.sup_norm(); }
    double smooth_radius(const Vec& x) const override { return u_.smooth_radius(x - h_); }
    std::optional<Witness> witness(const Vec& x) const override
    {
        auto w = u_.witness(x - h_);
        if (w)
            w->center += h_;
        return w;
    }
    Growth growth(const Vec& x) const override { return u_.growth(x - h_); }
    double oscillation_length() const override { return u_.oscillation_length(); }
    std::vector<double> ray_breakpoints(const Vec& x, const Vec& dir) const override
    {
        return u_.ray_breakpoints(x - h_, dir);
    }
    std::optional<FarField> far_field(const Vec& x) const override { return u_.far_field(x - h_); }
    std::optional<Vec> ridge_normal() const override { return u_.ridge_normal(); }

private:
    ScalarField u_;
    Vec h_;
};

} // namespace detail

inline ScalarField make_gaussian(const Vec& center, double width)
{
    return ScalarField(std::make_shared<detail::Gaussian>(center, width));
}

/// A |x - pole|^{2s-1} + B. Values are defined everywhere; derivatives are
/// rejected within `guard` of the pole. sup_norm is taken over |x - pole| <= box.
inline ScalarField make_cone(double amplitude, double offset, const Vec& pole, double s, double guard = 1e-3,
    double box = 10.0)
{
    return ScalarField(std::make_shared<detail::Cone>(amplitude, offset, pole, s, guard, box));
}

inline ScalarField make_bump(const Vec& center, double radius)
{
    return ScalarField(std::make_shared<detail::Bump>(center, radius));
}

/// Quadratic (constant, gradient, hessian about `center`) multiplied by a C^inf
/// radial window equal to 1 on B_inner(center) and 0 outside B_outer(center).
inline ScalarField make_windowed_poly(const Mat& hessian, const Vec& gradient, double constant, const Vec& center,
    double inner, double outer)
{
    return ScalarField(std::make_shared<detail::WindowedQuadratic>(hessian, gradient, constant, center, inner, outer));
}

inline ScalarField make_cosine(const Vec& wave)
{
    return ScalarField(std::make_shared<detail::Cosine>(wave));
}

inline ScalarField make_affine(const Vec& slope, double constant)
{
    return ScalarField(std::make_shared<detail::Affine>(slope, constant));
}

inline ScalarField make_constant(int n, double constant)
{
    require_dimension(n);
    return make_affine(Vec::Zero(n), constant);
}

/// lambda * u + shift
inline ScalarField scaled(const ScalarField& u, double lambda, double shift = 0.0)
{
    return ScalarField(std::make_shared<detail::Scaled>(u, lambda, shift));
}

inline ScalarField negated(const ScalarField& u)
{
    return scaled(u, -1.0, 0.0);
}

/// v(x) = u(x - h)
inline ScalarField translated(const ScalarField& u, const Vec& h)
{
    return ScalarField(std::make_shared<detail::Translated>(u, h));
}

// ---------------------------------------------------------------------------
// Registry

using FieldParams = std::map<std::string, std::vector<double>>;

namespace detail {

inline const std::vector<double>& param(const FieldParams& params, const std::string& key)
{
    const auto it = params.find(key);
    if (it == params.end())
        throw ConfigError("missing field parameter '" + key + "'");
    return it->second;
}

inline double scalar_param(const FieldParams& params, const std::string& key, std::optional<double> fallback = {})
{
    const auto it = params.find(key);
    if (it == params.end()) {
        if (fallback)
            return *fallback;
        throw ConfigError("missing field parameter '" + key + "'");
    }
    if (it->second.size() != 1)
        throw ConfigError("field parameter '" + key + "' must be a single number");
    return it->second.front();
}

inline Vec vector_param(const FieldParams& params, const std::string& key, int n, std::optional<double> fill = {})
{
    const auto it = params.find(key);
    if (it == params.end()) {
        if (fill)
            return Vec::Constant(n, *fill);
        throw ConfigError("missing field parameter '" + key + "'");
    }
    if (static_cast<int>(it->second.size()) != n)
        throw ConfigError("field parameter '" + key + "' must have " + std::to_string(n) + " entries, got "
            + std::to_string(it->second.size()));
    Vec v(n);
    for (int i = 0; i < n; ++i)
        v(i) = it->second[i];
    return v;
}

} // namespace detail

struct FieldEntry {
    std::string name;
    std::string parameters;  // human-readable parameter list with defaults
};

inline std::vector<FieldEntry> field_catalog()
{
    return {
        {"gaussian", "center (n, default 0), width (default 1)"},
        {"cone", "amplitude (1), offset (0), pole (n, 0), s (required), guard (1e-3), box (10)"},
        {"bump", "center (n, 0), radius (1)"},
        {"windowed_quadratic", "hessian (n*n, column-major), gradient (n, 0), constant (0), center (n, 0), inner (1), outer (2)"},
        {"cosine", "wave (n)"},
        {"affine", "slope (n), constant (0)"},
        {"constant", "constant (0)"},
    };
}

/// Construct a corpus field from its name and parameter lists.
inline ScalarField make_field(const std::string& name, int n, const FieldParams& params)
{
    using namespace detail;
    if (n < 1 || n > max_dimension)
        throw ConfigError("dimension n must lie in [1,3], got " + std::to_string(n));
    if (name == "gaussian")
        return make_gaussian(vector_param(params, "center", n, 0.0), scalar_param(params, "width", 1.0));
    if (name == "cone")
        return make_cone(scalar_param(params, "amplitude", 1.0), scalar_param(params, "offset", 0.0),
            vector_param(params, "pole", n, 0.0), scalar_param(params, "s"), scalar_param(params, "guard", 1e-3),
            scalar_param(params, "box", 10.0));
    if (name == "bump")
        return make_bump(vector_param(params, "center", n, 0.0), scalar_param(params, "radius", 1.0));
    if (name == "windowed_quadratic") {
        const auto& h = param(params, "hessian");
        if (static_cast<int>(h.size()) != n * n)
            throw ConfigError("field parameter 'hessian' must have n*n entries");
        Mat H(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                H(i, j) = h[j * n + i];
        return make_windowed_poly(H, vector_param(params, "gradient", n, 0.0), scalar_param(params, "constant", 0.0),
            vector_param(params, "center", n, 0.0), scalar_param(params, "inner", 1.0),
            scalar_param(params, "outer", 2.0));
    }
    if (name == "cosine")
        return make_cosine(vector_param(params, "wave", n));
    if (name == "affine")
        return make_affine(vector_param(params, "slope", n), scalar_param(params, "constant", 0.0));
    if (name == "constant")
        return make_constant(n, scalar_param(params, "constant", 0.0));
    throw ConfigError("unknown field '" + name + "'");
}

// ---------------------------------------------------------------------------
// Derivative validation

struct DerivativeReport {
    double max_gradient_error = 0.0;  // relative
    double max_hessian_error = 0.0;   // relative
    double threshold = 1e-5;
    std::size_t points = 0;
    bool pass = true;
};

/// Compare analytic derivatives with central differences of the value at
/// step h = relative_step * smooth_radius(x). Errors are relative to the
/// larger of the analytic size and the field's natural scale sup/eta^k.
inline DerivativeReport validate_derivatives(const ScalarField& u, const std::vector<Vec>& points,
    double relative_step = 1e-4, double threshold = 1e-5)
{
    DerivativeReport rep;
    rep.threshold = threshold;
    const int n = u.dimension();
    for (const Vec& x : points) {
        require_point(u, x);
        const double eta = u.smooth_radius(x);
        const double h = relative_step * eta;
        const Vec grad = u.gradient(x);
        const Mat hess = u.hessian(x);
        Vec fd_grad(n);
        Mat fd_hess(n, n);
        for (int i = 0; i < n; ++i) {
            Vec ei = Vec::Zero(n);
            ei(i) = h;
            fd_grad(i) = (u.value(x + ei) - u.value(x - ei)) / (2.0 * h);
            for (int j = 0; j < n; ++j) {
                Vec ej = Vec::Zero(n);
                ej(j) = h;
                fd_hess(i, j) = (u.value(x + ei + ej) - u.value(x + ei - ej) - u.value(x - ei + ej)
                                    + u.value(x - ei - ej))
                    / (4.0 * h * h);
            }
        }
        const double scale = std::max(std::abs(u.value(x)), 1e-3 * u.sup_norm());
        const double gscale = std::max(grad.lpNorm<Eigen::Infinity>(), scale / eta);
        const double hscale = std::max(hess.lpNorm<Eigen::Infinity>(), scale / (eta * eta));
        rep.max_gradient_error = std::max(rep.max_gradient_error, (grad - fd_grad).lpNorm<Eigen::Infinity>() / gscale);
        rep.max_hessian_error = std::max(rep.max_hessian_error, (hess - fd_hess).lpNorm<Eigen::Infinity>() / hscale);
        ++rep.points;
    }
    rep.pass = rep.max_gradient_error <= threshold && rep.max_hessian_error <= threshold;
    return rep;
}

} // namespace fracmv

#endif // FRACMV_FIELDS_HPP
