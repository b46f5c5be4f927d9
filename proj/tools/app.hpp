#ifndef FRACMV_APP_HPP
#define FRACMV_APP_HPP

// Experiment runner behind the fracmv command line: configuration, the
// operator registry, execution and CSV/JSON emission.

#include "fracmv/fracmv.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace fracmv::app {

using json = nlohmann::ordered_json;

enum class Command { eval, verify, limit, appendix, constants, corpus };

inline const char* to_string(Command c)
{
    switch (c) {
    case Command::eval:
        return "eval";
    case Command::verify:
        return "verify";
    case Command::limit:
        return "limit";
    case Command::appendix:
        return "appendix";
    case Command::constants:
        return "constants";
    case Command::corpus:
        return "corpus";
    }
    return "eval";
}

inline Command parse_command(const std::string& text)
{
    for (Command c : {Command::eval, Command::verify, Command::limit, Command::appendix, Command::constants,
             Command::corpus})
        if (text == to_string(c))
            return c;
    throw ConfigError("unknown command '" + text + "' (expected eval, verify, limit, appendix, constants or corpus)");
}

struct ExperimentConfig {
    Command command = Command::eval;
    std::string field = "gaussian";
    FieldParams field_params;
    std::string op;
    int n = 2;
    std::vector<double> x;  // empty: default_point(n)
    double s = 0.5;
    double p = 2.0;
    double r = 0.1;
    std::vector<double> r_grid;  // empty: the sweep's default
    std::vector<double> s_grid;
    Variant variant = Variant::automatic;
    QuadratureSpec spec;
    std::string output_dir;  // empty: $FRACMV_OUTPUT_DIR, else nothing written
    std::string stem;        // empty: command[-operator]
};

/// Evaluation point when none is configured; non-critical for the centred
/// corpus fields.
inline Vec default_point(int n)
{
    const double coords[] = {0.4, -0.3, 0.2};
    Vec x(n);
    for (int i = 0; i < n; ++i)
        x(i) = coords[i];
    return x;
}

inline Vec point_of(const ExperimentConfig& cfg)
{
    if (cfg.x.empty())
        return default_point(cfg.n);
    if (static_cast<int>(cfg.x.size()) != cfg.n)
        throw ConfigError("config field 'x' must have n = " + std::to_string(cfg.n) + " coordinates");
    Vec x(cfg.n);
    for (int i = 0; i < cfg.n; ++i)
        x(i) = cfg.x[i];
    return x;
}

// ---------------------------------------------------------------------------
// JSON configuration

inline json spec_to_json(const QuadratureSpec& q)
{
    return json{{"jacobi_nodes", q.jacobi_nodes}, {"smooth_nodes", q.smooth_nodes}, {"sphere_order", q.sphere_order},
        {"inner_cutoff", q.inner_cutoff}, {"truncation_tol", q.truncation_tol}, {"max_radius_cap", q.max_radius_cap},
        {"max_nodes", q.max_nodes}, {"self_check", q.self_check}};
}

namespace detail {

template <class T>
T get_field(const json& j, const std::string& key)
{
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config field '" + key + "': " + e.what());
    }
}

inline std::vector<double> number_list(const json& j, const std::string& key)
{
    if (j.is_number())
        return {j.get<double>()};
    return get_field<std::vector<double>>(j, key);
}

} // namespace detail

/// Apply one quadrature override, "sphere_order" = "128" style.
inline void set_spec_value(QuadratureSpec& q, const std::string& key, double v)
{
    auto count = [&](const char* name) {
        if (!(v == std::floor(v)) || v < 0.0 || v > 2e9)
            throw ConfigError(std::string("quadrature field '") + name + "' must be a non-negative integer");
        return static_cast<int>(v);
    };
    if (key == "jacobi_nodes")
        q.jacobi_nodes = count("jacobi_nodes");
    else if (key == "smooth_nodes")
        q.smooth_nodes = count("smooth_nodes");
    else if (key == "sphere_order")
        q.sphere_order = count("sphere_order");
    else if (key == "inner_cutoff")
        q.inner_cutoff = v;
    else if (key == "truncation_tol")
        q.truncation_tol = v;
    else if (key == "max_radius_cap")
        q.max_radius_cap = v;
    else if (key == "max_nodes")
        q.max_nodes = static_cast<long>(v);
    else if (key == "self_check")
        q.self_check = v != 0.0;
    else
        throw ConfigError("unknown quadrature field '" + key + "'");
}

inline QuadratureSpec spec_from_json(const json& j, QuadratureSpec q = {})
{
    if (!j.is_object())
        throw ConfigError("config field 'quadrature' must be an object");
    for (const auto& [key, value] : j.items()) {
        if (value.is_boolean())
            set_spec_value(q, key, value.get<bool>() ? 1.0 : 0.0);
        else
            set_spec_value(q, key, detail::get_field<double>(value, "quadrature." + key));
    }
    return q;
}

/// Overlay a JSON document on `base`. Unknown keys are errors.
inline ExperimentConfig config_from_json(const json& j, ExperimentConfig cfg = {})
{
    using detail::get_field;
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "command")
            cfg.command = parse_command(get_field<std::string>(v, key));
        else if (key == "field") {
            if (v.is_string()) {
                cfg.field = v.get<std::string>();
                continue;
            }
            if (!v.is_object())
                throw ConfigError("config field 'field' must be a name or {\"name\", \"params\"}");
            for (const auto& [fk, fv] : v.items()) {
                if (fk == "name")
                    cfg.field = get_field<std::string>(fv, "field.name");
                else if (fk == "params") {
                    if (!fv.is_object())
                        throw ConfigError("config field 'field.params' must be an object");
                    for (const auto& [pk, pv] : fv.items())
                        cfg.field_params[pk] = detail::number_list(pv, "field.params." + pk);
                } else
                    throw ConfigError("unknown config field 'field." + fk + "'");
            }
        } else if (key == "operator")
            cfg.op = get_field<std::string>(v, key);
        else if (key == "n")
            cfg.n = get_field<int>(v, key);
        else if (key == "x")
            cfg.x = detail::number_list(v, key);
        else if (key == "s")
            cfg.s = get_field<double>(v, key);
        else if (key == "p")
            cfg.p = get_field<double>(v, key);
        else if (key == "r")
            cfg.r = get_field<double>(v, key);
        else if (key == "r_grid")
            cfg.r_grid = detail::number_list(v, key);
        else if (key == "s_grid")
            cfg.s_grid = detail::number_list(v, key);
        else if (key == "variant")
            cfg.variant = parse_variant(get_field<std::string>(v, key));
        else if (key == "quadrature")
            cfg.spec = spec_from_json(v, cfg.spec);
        else if (key == "output") {
            if (v.is_string()) {
                cfg.output_dir = v.get<std::string>();
                continue;
            }
            if (!v.is_object())
                throw ConfigError("config field 'output' must be a directory or {\"dir\", \"stem\"}");
            for (const auto& [ok, ov] : v.items()) {
                if (ok == "dir")
                    cfg.output_dir = get_field<std::string>(ov, "output.dir");
                else if (ok == "stem")
                    cfg.stem = get_field<std::string>(ov, "output.stem");
                else
                    throw ConfigError("unknown config field 'output." + ok + "'");
            }
        } else
            throw ConfigError("unknown config field '" + key + "'");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {})
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        // the message carries line and column
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return config_from_json(j, std::move(base));
}

// ---------------------------------------------------------------------------
// Operator registry

struct OperatorEntry {
    std::string name;
    std::string description;
    bool variants = false;     // accepts a trailing + or -
    bool uses_order = false;
    bool upper_order = false;  // s must lie in (1/2,1)
    bool uses_exponent = false;
    bool uses_radius = false;
    std::function<double(const ScalarField&, const Vec&, const ExperimentConfig&, Variant)> eval;
};

inline const std::vector<OperatorEntry>& operator_registry()
{
    using Cfg = ExperimentConfig;
    static const std::vector<OperatorEntry> ops = {
        {"lap", "Laplacian", false, false, false, false, false,
            [](const ScalarField& u, const Vec& x, const Cfg&, Variant) { return laplacian(u, x); }},
        {"plap", "p-Laplacian |grad u|^{p-2}(Lap u + (p-2) Lap_inf u)", false, false, false, true, false,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) { return p_laplacian(u, x, c.p); }},
        {"nplap", "normalized p-Laplacian", true, false, false, true, false,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant v) {
                return normalized_p_laplacian(u, x, c.p, v);
            }},
        {"inflap", "normalized infinity Laplacian", true, false, false, false, false,
            [](const ScalarField& u, const Vec& x, const Cfg&, Variant v) { return infinity_laplacian(u, x, v); }},
        {"pmean", "local p-mean on the sphere of radius r", false, false, false, true, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) {
                return local_p_mean(u, x, c.r, c.p, c.spec);
            }},
        {"gpmean", "local gradient-dependent p-mean", true, false, false, true, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant v) {
                return local_grad_p_mean(u, x, c.r, c.p, v, c.spec);
            }},
        {"infmean", "local infinity mean (midrange on the gradient line)", true, false, false, false, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant v) {
                return local_infinity_mean(u, x, c.r, v, c.spec);
            }},
        {"fplap", "fractional p-Laplacian integral (no normalizing constant)", false, true, false, true, false,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) {
                return frac_p_laplacian(u, OperatorParams{c.n, c.s, c.p, x, 0.0}, c.spec);
            }},
        {"Drsp", "(s,p)-mean weight D_r", false, true, false, true, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) {
                return d_rsp(u, OperatorParams{c.n, c.s, c.p, x, c.r}, c.spec);
            }},
        {"Mrsp", "(s,p)-mean M_r", false, true, false, true, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) {
                return m_rsp(u, OperatorParams{c.n, c.s, c.p, x, c.r}, c.spec);
            }},
        {"fp-residual", "D_r (u - M_r) - fractional p-Laplacian", false, true, false, true, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) {
                return frac_p_residual(u, OperatorParams{c.n, c.s, c.p, x, c.r}, c.spec);
            }},
        {"gfplap", "gradient-dependent fractional p-Laplacian", true, true, true, true, false,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant v) {
                return grad_frac_p_laplacian(u, x, c.s, c.p, v, c.spec);
            }},
        {"gfpmean", "gradient-dependent (s,p)-mean", true, true, true, true, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant v) {
                return grad_frac_p_mean(u, x, c.s, c.p, c.r, v, c.spec);
            }},
        {"gfp-residual", "u - mean - scaled gradient-dependent operator", true, true, true, true, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant v) {
                return grad_frac_p_residual(u, x, c.s, c.p, c.r, v, c.spec);
            }},
        {"inffrac", "infinity fractional Laplacian", false, true, true, false, false,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) {
                return infinity_frac_laplacian(u, x, c.s, c.spec);
            }},
        {"inffracmean", "infinity fractional mean", false, true, true, false, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) {
                return infinity_frac_mean(u, x, c.s, c.r, c.spec);
            }},
        {"inf-residual", "u - mean - scaled infinity fractional Laplacian", false, true, true, false, true,
            [](const ScalarField& u, const Vec& x, const Cfg& c, Variant) {
                return infinity_frac_residual(u, x, c.s, c.r, c.spec);
            }},
    };
    return ops;
}

struct ResolvedOperator {
    const OperatorEntry* entry = nullptr;
    Variant variant = Variant::automatic;
};

inline std::string known_operators()
{
    std::string names;
    for (const OperatorEntry& e : operator_registry())
        names += (names.empty() ? "" : ", ") + e.name + (e.variants ? "[+|-]" : "");
    return names;
}

/// "gfplap+" -> gfplap with the plus variant; a bare name keeps `fallback`.
inline ResolvedOperator resolve_operator(const std::string& name, Variant fallback = Variant::automatic)
{
    for (const OperatorEntry& e : operator_registry())
        if (e.name == name)
            return {&e, fallback};
    if (!name.empty() && (name.back() == '+' || name.back() == '-')) {
        const std::string base = name.substr(0, name.size() - 1);
        for (const OperatorEntry& e : operator_registry())
            if (e.name == base && e.variants)
                return {&e, name.back() == '+' ? Variant::plus : Variant::minus};
    }
    throw ConfigError("unknown operator '" + name + "'; known: " + known_operators());
}

/// Domain checks that must fail before any quadrature runs.
inline void validate_parameters(const OperatorEntry& e, const ExperimentConfig& cfg)
{
    require_dimension(cfg.n);
    if (e.upper_order)
        require_upper_order(cfg.s);
    else if (e.uses_order)
        require_order(cfg.s);
    if (e.uses_exponent)
        require_exponent(cfg.p);
    if (e.uses_radius)
        require(cfg.r > 0.0 && std::isfinite(cfg.r), "r must be positive");
    cfg.spec.validate();
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string to_csv(const Table& t)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        out << (i ? "," : "") << csv_escape(t.header[i]);
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "");
            if (const double* d = std::get_if<double>(&row[i]))
                out << format_double(*d);
            else
                out << csv_escape(std::get<std::string>(row[i]));
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Report <-> JSON

namespace detail {

inline json number(double v)
{
    if (std::isnan(v))
        return nullptr;
    return v;
}

inline double number_of(const json& j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline std::vector<double> numbers_of(const json& j)
{
    std::vector<double> v;
    for (const json& e : j)
        v.push_back(number_of(e));
    return v;
}

inline json numbers(const std::vector<double>& v)
{
    json a = json::array();
    for (double d : v)
        a.push_back(number(d));
    return a;
}

} // namespace detail

inline json to_json(const ExpansionReport& rep)
{
    using detail::number;
    return json{{"label", rep.label}, {"abscissae", detail::numbers(rep.abscissae)},
        {"residuals", detail::numbers(rep.residuals)}, {"fitted_slope", number(rep.fitted_slope)},
        {"slope_ci", number(rep.slope_ci)}, {"expected_slope", number(rep.expected_slope)},
        {"tolerance", number(rep.tolerance)}, {"one_sided", rep.one_sided},
        {"window", json::array({rep.window.first, rep.window.second})}, {"saturated", rep.saturated},
        {"faster", rep.faster}, {"pass", rep.pass}, {"spec", spec_to_json(rep.spec)}};
}

inline ExpansionReport expansion_report_from_json(const json& j)
{
    ExpansionReport rep;
    rep.label = j.at("label").get<std::string>();
    rep.abscissae = detail::numbers_of(j.at("abscissae"));
    rep.residuals = detail::numbers_of(j.at("residuals"));
    rep.fitted_slope = detail::number_of(j.at("fitted_slope"));
    rep.slope_ci = detail::number_of(j.at("slope_ci"));
    rep.expected_slope = detail::number_of(j.at("expected_slope"));
    rep.tolerance = detail::number_of(j.at("tolerance"));
    rep.one_sided = j.at("one_sided").get<bool>();
    rep.window = {j.at("window").at(0).get<std::size_t>(), j.at("window").at(1).get<std::size_t>()};
    rep.saturated = j.at("saturated").get<bool>();
    rep.faster = j.at("faster").get<bool>();
    rep.pass = j.at("pass").get<bool>();
    rep.spec = spec_from_json(j.at("spec"));
    return rep;
}

inline json to_json(const LimitReport& rep)
{
    using detail::number;
    return json{{"label", rep.label}, {"s_values", detail::numbers(rep.s_values)},
        {"values", detail::numbers(rep.values)}, {"relative_errors", detail::numbers(rep.relative_errors)},
        {"target", number(rep.target)}, {"extrapolated", number(rep.extrapolated)},
        {"extrapolated_error", number(rep.extrapolated_error)}, {"tolerance", number(rep.tolerance)},
        {"scaled", rep.scaled}, {"pass", rep.pass}, {"spec", spec_to_json(rep.spec)}};
}

inline LimitReport limit_report_from_json(const json& j)
{
    LimitReport rep;
    rep.label = j.at("label").get<std::string>();
    rep.s_values = detail::numbers_of(j.at("s_values"));
    rep.values = detail::numbers_of(j.at("values"));
    rep.relative_errors = detail::numbers_of(j.at("relative_errors"));
    rep.target = detail::number_of(j.at("target"));
    rep.extrapolated = detail::number_of(j.at("extrapolated"));
    rep.extrapolated_error = detail::number_of(j.at("extrapolated_error"));
    rep.tolerance = detail::number_of(j.at("tolerance"));
    rep.scaled = j.at("scaled").get<bool>();
    rep.pass = j.at("pass").get<bool>();
    rep.spec = spec_from_json(j.at("spec"));
    return rep;
}

// ---------------------------------------------------------------------------
// Execution

struct RunResult {
    Table table;
    json summary;
    bool pass = true;
};

namespace detail {

inline json context(const ExperimentConfig& cfg)
{
    json params = json::object();
    for (const auto& [k, v] : cfg.field_params)
        params[k] = v;
    json j{{"command", to_string(cfg.command)}, {"field", json{{"name", cfg.field}, {"params", params}}},
        {"n", cfg.n}};
    if (cfg.command != Command::appendix) {
        const Vec x = point_of(cfg);
        j["x"] = numbers(std::vector<double>(x.data(), x.data() + x.size()));
    }
    return j;
}

inline ResidualKind residual_kind(const std::string& name)
{
    for (ResidualKind k : {ResidualKind::frac_p, ResidualKind::grad_frac_p, ResidualKind::infinity_frac,
             ResidualKind::local_p_mean, ResidualKind::local_grad_p_mean, ResidualKind::local_infinity_mean})
        if (name == to_string(k))
            return k;
    throw ConfigError("unknown residual '" + name
        + "'; known: fp-residual, gfp-residual, inf-residual, pmean-residual, gpmean-residual, infmean-residual");
}

inline LimitKind limit_kind(const std::string& name)
{
    for (LimitKind k : {LimitKind::frac_p, LimitKind::d_rsp, LimitKind::m_rsp, LimitKind::grad_frac_p,
             LimitKind::grad_frac_p_mean, LimitKind::infinity_frac, LimitKind::infinity_frac_mean})
        if (name == to_string(k))
            return k;
    throw ConfigError("unknown limit family '" + name + "'; known: fplap, Drsp, Mrsp, gfplap, gfpmean, inffrac, inffracmean");
}

/// Strip a variant suffix from sweep names: "gfp-residual+" -> plus.
inline std::string split_variant(const std::string& name, Variant& variant)
{
    if (!name.empty() && (name.back() == '+' || name.back() == '-') && name != "-") {
        variant = name.back() == '+' ? Variant::plus : Variant::minus;
        return name.substr(0, name.size() - 1);
    }
    return name;
}

inline void require_operator(const ExperimentConfig& cfg)
{
    if (cfg.op.empty())
        throw ConfigError(std::string("command '") + to_string(cfg.command) + "' needs an operator name");
}

inline RunResult run_eval(const ExperimentConfig& cfg)
{
    require_operator(cfg);
    const ResolvedOperator op = resolve_operator(cfg.op, cfg.variant);
    validate_parameters(*op.entry, cfg);
    const ScalarField u = make_field(cfg.field, cfg.n, cfg.field_params);
    const Vec x = point_of(cfg);
    const double value = op.entry->eval(u, x, cfg, op.variant);
    RunResult res;
    res.table.header = {"operator", "variant", "s", "p", "r", "value"};
    res.table.rows.push_back({op.entry->name, std::string(to_string(op.variant)), cfg.s, cfg.p, cfg.r, value});
    res.summary = context(cfg);
    res.summary["operator"] = op.entry->name;
    res.summary["variant"] = to_string(op.variant);
    res.summary["s"] = cfg.s;
    res.summary["p"] = cfg.p;
    res.summary["r"] = cfg.r;
    res.summary["value"] = number(value);
    res.summary["spec"] = spec_to_json(cfg.spec);
    res.summary["pass"] = true;
    return res;
}

inline RunResult run_verify(const ExperimentConfig& cfg)
{
    require_operator(cfg);
    SweepOptions opts;
    opts.variant = cfg.variant;
    const ResidualKind kind = residual_kind(split_variant(cfg.op, opts.variant));
    opts.s = cfg.s;
    opts.p = cfg.p;
    opts.spec = cfg.spec;
    require_dimension(cfg.n);
    if (kind == ResidualKind::grad_frac_p || kind == ResidualKind::infinity_frac)
        require_upper_order(cfg.s);
    else if (kind == ResidualKind::frac_p)
        require_order(cfg.s);
    require_exponent(cfg.p);
    cfg.spec.validate();
    const ScalarField u = make_field(cfg.field, cfg.n, cfg.field_params);
    const ExpansionReport rep = r_sweep(kind, u, point_of(cfg), opts, cfg.r_grid);
    RunResult res;
    res.table.header = {"r", "residual"};
    for (std::size_t i = 0; i < rep.abscissae.size(); ++i)
        res.table.rows.push_back({rep.abscissae[i], rep.residuals[i]});
    res.summary = context(cfg);
    res.summary["s"] = cfg.s;
    res.summary["p"] = cfg.p;
    res.summary["variant"] = to_string(opts.variant);
    res.summary["report"] = to_json(rep);
    res.summary["pass"] = rep.pass;
    res.pass = rep.pass;
    return res;
}

inline RunResult run_limit(const ExperimentConfig& cfg)
{
    require_operator(cfg);
    LimitOptions opts;
    opts.variant = cfg.variant;
    const LimitKind kind = limit_kind(split_variant(cfg.op, opts.variant));
    opts.p = cfg.p;
    opts.r = cfg.r;
    opts.spec = cfg.spec;
    require_dimension(cfg.n);
    require_exponent(cfg.p);
    cfg.spec.validate();
    const ScalarField u = make_field(cfg.field, cfg.n, cfg.field_params);
    const LimitReport rep = cfg.s_grid.empty() ? s_sweep(kind, u, point_of(cfg), opts)
                                               : s_sweep(kind, u, point_of(cfg), opts, cfg.s_grid);
    RunResult res;
    res.table.header = {"s", "value", "relative_error"};
    for (std::size_t i = 0; i < rep.s_values.size(); ++i)
        res.table.rows.push_back({rep.s_values[i], rep.values[i], rep.relative_errors[i]});
    res.summary = context(cfg);
    res.summary["p"] = cfg.p;
    res.summary["r"] = cfg.r;
    res.summary["variant"] = to_string(opts.variant);
    res.summary["report"] = to_json(rep);
    res.summary["pass"] = rep.pass;
    res.pass = rep.pass;
    return res;
}

inline RunResult run_appendix(const ExperimentConfig& cfg)
{
    cfg.spec.validate();
    const AppendixReport rep = appendix_checks(cfg.s, cfg.r_grid, 0.999, cfg.spec);
    RunResult res;
    res.table.header = {"r", "bounded", "bounded_closed_form", "tail", "tail_ratio", "scaled"};
    for (std::size_t i = 0; i < rep.r_grid.size(); ++i)
        res.table.rows.push_back({rep.r_grid[i], rep.bounded_values[i], rep.bounded_closed_form[i],
            rep.tail_values[i], rep.tail_ratios[i], rep.scaled_values[i]});
    res.summary = json{{"command", "appendix"}, {"s", cfg.s}, {"bounded_ratio", number(rep.bounded_ratio)},
        {"bounded_pass", rep.bounded_pass}, {"tail_target", number(rep.tail_target)},
        {"tail_error", number(rep.tail_error)}, {"tail_slope", number(rep.tail_slope)},
        {"tail_pass", rep.tail_pass}, {"scaled_pass", rep.scaled_pass}, {"spec", spec_to_json(cfg.spec)},
        {"pass", rep.pass}};
    res.pass = rep.pass;
    return res;
}

inline RunResult run_constants(const ExperimentConfig& cfg)
{
    require_dimension(cfg.n);
    require_order(cfg.s);
    require_exponent(cfg.p);
    const int n = cfg.n;
    const double s = cfg.s, p = cfg.p;
    std::vector<std::pair<std::string, double>> rows = {
        {"C_ns", fractional_laplacian_constant(n, s)},
        {"c_ns", mean_kernel_constant(n, s)},
        {"c_s", radial_tail_constant(s)},
        {"c_s_ray", ray_mean_constant(s)},
    };
    const DirectionalMoments dm = directional_moments(n, p);
    rows.emplace_back("gamma_p", dm.gamma_p);
    rows.emplace_back("gamma_p_prime", dm.gamma_p_prime);
    rows.emplace_back("C_np", sphere_p_moment(n, p));
    rows.emplace_back("local_p_mean_coefficient", local_p_mean_coefficient(n, p));
    rows.emplace_back("stated_local_p_mean_constant", stated_local_p_mean_constant(n, p));
    if (n >= 2) {
        const CapKernel cap = CapKernel::make(n, p);
        rows.emplace_back("c_p", cap.threshold);
        rows.emplace_back("alpha_p", cap.alpha);
        rows.emplace_back("beta_p", cap.beta);
        rows.emplace_back("gamma_cap", cap.gamma_cap);
        rows.emplace_back("C_sp", cap_mean_constant(s, cap));
    }
    RunResult res;
    res.table.header = {"name", "value"};
    json values = json::object();
    for (const auto& [name, v] : rows) {
        res.table.rows.push_back({name, v});
        values[name] = number(v);
    }
    res.summary = json{{"command", "constants"}, {"n", n}, {"s", s}, {"p", p}, {"constants", values}, {"pass", true}};
    return res;
}

inline RunResult run_corpus()
{
    RunResult res;
    res.table.header = {"kind", "name", "description"};
    json fields = json::array(), ops = json::array();
    for (const FieldEntry& f : field_catalog()) {
        res.table.rows.push_back({std::string("field"), f.name, f.parameters});
        fields.push_back(json{{"name", f.name}, {"parameters", f.parameters}});
    }
    for (const OperatorEntry& e : operator_registry()) {
        const std::string name = e.name + (e.variants ? "[+|-]" : "");
        res.table.rows.push_back({std::string("operator"), name, e.description});
        ops.push_back(json{{"name", e.name}, {"variants", e.variants}, {"description", e.description}});
    }
    res.summary = json{{"command", "corpus"}, {"fields", fields}, {"operators", ops}, {"pass", true}};
    return res;
}

} // namespace detail

inline RunResult run(const ExperimentConfig& cfg)
{
    switch (cfg.command) {
    case Command::eval:
        return detail::run_eval(cfg);
    case Command::verify:
        return detail::run_verify(cfg);
    case Command::limit:
        return detail::run_limit(cfg);
    case Command::appendix:
        return detail::run_appendix(cfg);
    case Command::constants:
        return detail::run_constants(cfg);
    case Command::corpus:
        return detail::run_corpus();
    }
    return {};
}

// ---------------------------------------------------------------------------
// Artifacts and exit codes

inline constexpr int exit_pass = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

inline int exit_code(ErrorCode code) { return code == ErrorCode::numerical ? exit_numerical : exit_usage; }

inline json error_json(const std::string& code, const std::string& message)
{
    return json{{"error", json{{"code", code}, {"message", message}}}};
}

inline std::string artifact_stem(const ExperimentConfig& cfg)
{
    if (!cfg.stem.empty())
        return cfg.stem;
    std::string stem = to_string(cfg.command);
    if (!cfg.op.empty() && cfg.command != Command::constants && cfg.command != Command::corpus
        && cfg.command != Command::appendix) {
        std::string op = cfg.op;
        std::string suffix;
        if (op.back() == '+' || op.back() == '-') {
            suffix = op.back() == '+' ? "-plus" : "-minus";
            op.pop_back();
        }
        stem += "-" + op + suffix;
    }
    return stem;
}

inline std::string output_dir(const ExperimentConfig& cfg)
{
    if (!cfg.output_dir.empty())
        return cfg.output_dir;
    if (const char* env = std::getenv("FRACMV_OUTPUT_DIR"))
        return env;
    return {};
}

struct Artifacts {
    std::string csv;
    std::string json;
};

/// Write <dir>/<stem>.csv and <dir>/<stem>.json; no-op without a directory.
inline std::optional<Artifacts> write_artifacts(const ExperimentConfig& cfg, const RunResult& res)
{
    const std::string dir = output_dir(cfg);
    if (dir.empty())
        return std::nullopt;
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    Artifacts a;
    a.csv = (fs::path(dir) / (artifact_stem(cfg) + ".csv")).string();
    a.json = (fs::path(dir) / (artifact_stem(cfg) + ".json")).string();
    std::ofstream(a.csv, std::ios::binary) << to_csv(res.table);
    std::ofstream(a.json, std::ios::binary) << res.summary.dump(2) << "\n";
    return a;
}

} // namespace fracmv::app

#endif // FRACMV_APP_HPP
