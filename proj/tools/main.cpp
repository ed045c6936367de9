// paravect — law checking and circuit analysis for parametric linear maps.
//
// Subcommands: lawcheck, encode, circuits, factor, stack. Every command
// prints a JSON report to stdout; reports are byte-identical across runs
// with the same seed and inputs, apart from elapsed-time fields.
//
// Exit codes: 0 all checks passed, 1 at least one check failed, 2 bad
// configuration or input.

#include "paravect/lawcheck.hpp"
#include "paravect/weights_io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <fstream>
#include <sstream>

namespace {

using namespace paravect;

int finish(const Report& report, const std::string& report_out) {
    const std::string text = toJson(report);
    std::cout << text;
    if (!report_out.empty()) {
        std::ofstream out(report_out);
        if (!out) {
            std::cerr << "error: cannot write " << report_out << "\n";
            return 2;
        }
        out << text;
    }
    return report.allPass() ? 0 : 1;
}

void addCommonFlags(CLI::App* cmd, RunConfig& cfg, std::vector<std::string>& tol_args,
                    std::string& dims_arg) {
    cmd->add_option("--seed", cfg.seed, "Root seed for all pseudorandom draws");
    cmd->add_option("--trials", cfg.trials, "Trials per randomized check")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", tol_args,
                    "Tolerance override, <check-name>=<value> (repeatable)");
    cmd->add_option("--dims", dims_arg, "Dimension bundle, d=..,dk=..,dv=..,n=..");
    cmd->add_option("--depth", cfg.depth, "Truncation depth for graded checks")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", cfg.out, "Output path (report, or table for encode)");
    cmd->add_option("--format", cfg.format, "Report format (json)")
        ->check(CLI::IsMember({"json"}));
}

void applyTolerances(RunConfig& cfg, const std::vector<std::string>& tol_args) {
    for (const auto& arg : tol_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos)
            throw ParseError("--tol expects <check-name>=<value>, got '" + arg + "'");
        const std::string name = arg.substr(0, eq);
        double value = 0.0;
        try {
            value = std::stod(arg.substr(eq + 1));
        } catch (const std::exception&) {
            throw ParseError("--tol " + name + ": not a number");
        }
        if (!(value > 0.0))
            throw ParseError("--tol " + name + ": tolerance must be positive");
        cfg.tolerances[name] = value;
    }
}

void applyDims(RunConfig& cfg, const std::string& dims_arg) {
    if (dims_arg.empty()) return;
    std::istringstream in(dims_arg);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ParseError("--dims expects key=value pairs, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        Index value = 0;
        try {
            value = static_cast<Index>(std::stoll(item.substr(eq + 1)));
        } catch (const std::exception&) {
            throw ParseError("--dims " + key + ": not an integer");
        }
        if (value < 1) throw ParseError("--dims " + key + ": must be positive");
        if (key == "d") cfg.d = value;
        else if (key == "dk") cfg.d_k = value;
        else if (key == "dv") cfg.d_v = value;
        else if (key == "n") cfg.n = value;
        else throw ParseError("--dims: unknown key '" + key + "'");
    }
}

Vector parseBase(const std::string& base_arg) {
    std::vector<double> entries;
    std::istringstream in(base_arg);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            entries.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParseError("--base: '" + item + "' is not a number");
        }
    }
    Vector v(static_cast<Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) v[static_cast<Index>(i)] = entries[i];
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"paravect — parametric linear morphisms, attention stacking, positional "
                 "encodings and circuit path expansion, with machine-checkable laws"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<std::string> tol_args;
    std::string dims_arg;

    auto* lawcheck_cmd =
        app.add_subcommand("lawcheck", "Run the full property suite, exit 0 iff all pass");
    addCommonFlags(lawcheck_cmd, cfg, tol_args, dims_arg);

    auto* encode_cmd =
        app.add_subcommand("encode", "Emit a positional-encoding table plus its report");
    std::string enc_kind = "sinusoidal";
    Index enc_d = 64;
    Index enc_count = 512;
    double enc_base_freq = 10000.0;
    std::string enc_base;
    addCommonFlags(encode_cmd, cfg, tol_args, dims_arg);
    encode_cmd->add_option("--kind", enc_kind, "sinusoidal | additive");
    encode_cmd->add_option("--d", enc_d, "Encoding dimension");
    encode_cmd->add_option("--count", enc_count, "Number of positions to emit");
    encode_cmd->add_option("--base-freq", enc_base_freq, "Sinusoidal base frequency");
    encode_cmd->add_option("--base", enc_base, "Additive generator, comma-separated");

    auto* circuits_cmd =
        app.add_subcommand("circuits", "Analyze a weight file: paths, ranks, residuals");
    std::string weights_path;
    addCommonFlags(circuits_cmd, cfg, tol_args, dims_arg);
    circuits_cmd->add_option("weights", weights_path, "Model weight file (JSON)")
        ->required();

    auto* factor_cmd = app.add_subcommand(
        "factor", "Factor a target encoding table through a source encoding");
    std::string factor_kind = "sinusoidal";
    Index factor_d = 8;
    Index factor_count = 64;
    double factor_base_freq = 10000.0;
    std::string factor_base;
    std::string factor_table;
    std::string factor_target;
    addCommonFlags(factor_cmd, cfg, tol_args, dims_arg);
    factor_cmd->add_option("--kind", factor_kind, "Source kind: sinusoidal | additive | table");
    factor_cmd->add_option("--d", factor_d, "Source dimension");
    factor_cmd->add_option("--count", factor_count, "Positions to fit over");
    factor_cmd->add_option("--base-freq", factor_base_freq, "Sinusoidal base frequency");
    factor_cmd->add_option("--base", factor_base, "Additive generator, comma-separated");
    factor_cmd->add_option("--table", factor_table,
                           "Source table file, for --kind table (defaults to the target)");
    factor_cmd->add_option("target", factor_target, "Target table file (JSON rows)")
        ->required();

    auto* stack_cmd = app.add_subcommand(
        "stack", "Free-monad depth sweep: monad-law residuals per truncation depth");
    addCommonFlags(stack_cmd, cfg, tol_args, dims_arg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        applyTolerances(cfg, tol_args);
        applyDims(cfg, dims_arg);

        if (*lawcheck_cmd) return finish(lawcheck::runLawcheck(cfg), cfg.out);
        if (*stack_cmd) return finish(lawcheck::runStack(cfg), cfg.out);
        if (*circuits_cmd) return finish(lawcheck::runCircuitsFile(cfg, weights_path), cfg.out);
        if (*encode_cmd) {
            lawcheck::EncodingSpec spec;
            spec.kind = enc_kind;
            spec.d = enc_d;
            spec.base_freq = enc_base_freq;
            if (!enc_base.empty()) spec.base = parseBase(enc_base);
            if (spec.kind == "additive" && spec.base.size() > 0)
                spec.d = spec.base.size();
            // --out carries the table path for encode; the report goes to
            // stdout.
            return finish(lawcheck::runEncode(cfg, spec, enc_count, cfg.out), "");
        }
        if (*factor_cmd) {
            lawcheck::EncodingSpec spec;
            spec.kind = factor_kind;
            spec.d = factor_d;
            spec.base_freq = factor_base_freq;
            if (factor_kind == "table")
                spec.table = factor_table.empty() ? factor_target : factor_table;
            if (!factor_base.empty()) spec.base = parseBase(factor_base);
            if (spec.kind == "additive" && spec.base.size() > 0)
                spec.d = spec.base.size();
            return finish(lawcheck::runFactor(cfg, spec, factor_target, factor_count),
                          cfg.out);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
