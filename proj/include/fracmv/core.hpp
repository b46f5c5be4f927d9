#ifndef FRACMV_CORE_HPP
#define FRACMV_CORE_HPP

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracmv {

/// Points and directions in R^n, n <= 3. Fixed max size, so no heap traffic.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline constexpr double pi = std::numbers::pi;
inline constexpr int max_dimension = 3;

/// Machine-readable failure classes. The CLI maps these onto exit codes.
enum class ErrorCode {
    domain,     // argument outside the documented domain
    numerical,  // quadrature / optimizer could not meet its tolerance
    config,     // malformed experiment configuration
};

inline const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::domain:
        return "domain_error";
    case ErrorCode::numerical:
        return "numerical_error";
    case ErrorCode::config:
        return "config_error";
    }
    return "unknown_error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what)
        , code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what)
        : Error(ErrorCode::domain, what)
    {
    }
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what)
        : Error(ErrorCode::numerical, what)
    {
    }
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what)
        : Error(ErrorCode::config, what)
    {
    }
};

inline void require(bool ok, const std::string& message)
{
    if (!ok)
        throw DomainError(message);
}

inline void require_dimension(int n, int lo = 1, int hi = max_dimension)
{
    require(n >= lo && n <= hi,
        "dimension n must lie in [" + std::to_string(lo) + "," + std::to_string(hi) + "], got "
            + std::to_string(n));
}

inline void require_order(double s)
{
    require(s > 0.0 && s < 1.0, "s must lie in (0,1), got " + std::to_string(s));
}

inline void require_upper_order(double s)
{
    require(s > 0.5 && s < 1.0, "s must lie in (1/2,1), got " + std::to_string(s));
}

inline void require_exponent(double p)
{
    require(p >= 2.0 && std::isfinite(p), "p must satisfy p >= 2, got " + std::to_string(p));
}

/// |t|^{q} t with the convention 0^0 = 1, i.e. the (q+1)-power difference map.
inline double signed_power(double t, double q)
{
    if (q == 0.0)
        return t;
    return std::pow(std::abs(t), q) * t;
}

/// |t|^q with 0^0 = 1.
inline double abs_power(double t, double q)
{
    if (q == 0.0)
        return 1.0;
    return std::pow(std::abs(t), q);
}

} // namespace fracmv

#endif // FRACMV_CORE_HPP
