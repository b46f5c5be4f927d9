#include "app.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace fracmv;
using namespace fracmv::app;

namespace {

struct Flags {
    std::string config;
    std::string op;
    std::string field;
    std::vector<std::string> fparams;
    int n = 0;
    double s = 0.0, p = 0.0, r = 0.0;
    std::vector<double> x, r_grid, s_grid;
    std::string variant;
    std::vector<std::string> quad;
    std::string output, stem, format = "json";
};

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* flag)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError(std::string(flag) + " expects key=value, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw ConfigError(what + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

void add_flags(CLI::App& sub, Flags& f, bool with_operator)
{
    sub.add_option("--config", f.config, "JSON experiment file; flags override its entries");
    if (with_operator)
        sub.add_option("operator", f.op, "operator, residual or limit family name");
    sub.add_option("--field", f.field, "corpus field name (see `corpus`)");
    sub.add_option("--fparam", f.fparams, "field parameter key=v1,v2,... (repeatable)");
    sub.add_option("--n", f.n, "dimension 1..3");
    sub.add_option("--s", f.s, "fractional order");
    sub.add_option("--p", f.p, "exponent p >= 2");
    sub.add_option("--r", f.r, "kernel radius");
    sub.add_option("--x", f.x, "evaluation point, comma separated")->delimiter(',');
    sub.add_option("--r-grid", f.r_grid, "radii for r-sweeps, comma separated")->delimiter(',');
    sub.add_option("--s-grid", f.s_grid, "orders for s-sweeps, comma separated")->delimiter(',');
    sub.add_option("--variant", f.variant, "plus, minus or auto (critical points)");
    sub.add_option("--quad", f.quad, "quadrature override key=value (repeatable)");
    sub.add_option("--output", f.output, "directory for <stem>.csv and <stem>.json (default $FRACMV_OUTPUT_DIR)");
    sub.add_option("--stem", f.stem, "artifact file stem");
    sub.add_option("--format", f.format, "what to print on stdout: json (summary) or csv (table)")
        ->check(CLI::IsMember({"json", "csv"}));
}

bool given(const CLI::App& sub, const char* name) { return sub.count(name) > 0; }

ExperimentConfig build_config(const CLI::App& sub, const Flags& f, Command command)
{
    ExperimentConfig cfg;
    cfg.command = command;
    if (!f.config.empty()) {
        cfg = load_config(f.config, cfg);
        if (cfg.command != command)
            throw ConfigError("config file '" + f.config + "' is for '" + to_string(cfg.command)
                + "', not '" + to_string(command) + "'");
    }
    if (!f.op.empty())
        cfg.op = f.op;
    if (given(sub, "--field")) {
        // a different field does not inherit the file's parameters
        if (f.field != cfg.field)
            cfg.field_params.clear();
        cfg.field = f.field;
    }
    for (const std::string& a : f.fparams) {
        const auto [key, value] = split_assignment(a, "--fparam");
        cfg.field_params[key] = parse_numbers(value, "--fparam " + key);
    }
    if (given(sub, "--n"))
        cfg.n = f.n;
    if (given(sub, "--s"))
        cfg.s = f.s;
    if (given(sub, "--p"))
        cfg.p = f.p;
    if (given(sub, "--r"))
        cfg.r = f.r;
    if (given(sub, "--x"))
        cfg.x = f.x;
    if (given(sub, "--r-grid"))
        cfg.r_grid = f.r_grid;
    if (given(sub, "--s-grid"))
        cfg.s_grid = f.s_grid;
    if (given(sub, "--variant"))
        cfg.variant = parse_variant(f.variant);
    for (const std::string& a : f.quad) {
        const auto [key, value] = split_assignment(a, "--quad");
        const auto v = parse_numbers(value, "--quad " + key);
        if (v.size() != 1)
            throw ConfigError("--quad " + key + " takes one value");
        set_spec_value(cfg.spec, key, v.front());
    }
    if (given(sub, "--output"))
        cfg.output_dir = f.output;
    if (given(sub, "--stem"))
        cfg.stem = f.stem;
    return cfg;
}

int report_error(const std::string& code, const std::string& message, int status)
{
    std::cerr << error_json(code, message).dump() << "\n";
    return status;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fracmv: fractional p-Laplacian operators, nonlocal means and their asymptotics"};
    app.require_subcommand(1, 1);
    Flags f;
    struct Sub {
        const char* name;
        const char* help;
        bool with_operator;
    };
    const Sub subs[] = {
        {"eval", "evaluate one operator at one point", true},
        {"verify", "r-sweep of an expansion residual and its fitted order", true},
        {"limit", "s-sweep of an operator family against its s -> 1 target", true},
        {"appendix", "the three auxiliary radial integrals", false},
        {"constants", "table of normalizing constants for (n, s, p)", false},
        {"corpus", "list corpus fields and operators", false},
    };
    for (const Sub& s : subs)
        add_flags(*app.add_subcommand(s.name, s.help), f, s.with_operator);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage_error", e.what(), exit_usage);
    }

    try {
        const CLI::App* sub = app.get_subcommands().front();
        const ExperimentConfig cfg = build_config(*sub, f, parse_command(sub->get_name()));
        const RunResult res = run(cfg);
        write_artifacts(cfg, res);
        if (f.format == "csv")
            std::cout << to_csv(res.table);
        else
            std::cout << res.summary.dump(2) << "\n";
        return res.pass ? exit_pass : exit_check_failed;
    } catch (const Error& e) {
        return report_error(fracmv::to_string(e.code()), e.what(), exit_code(e.code()));
    } catch (const std::exception& e) {
        return report_error("internal_error", e.what(), exit_numerical);
    }
}
