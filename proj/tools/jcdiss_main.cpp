// jcdiss: regenerate the purity / excited-population time series of the
// dissipative Jaynes-Cummings model and cross-check closed forms against the
// brute-force master-equation solver.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "jcdiss/repro.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Flags {
    std::string config;
    std::vector<std::string> ratios;
    std::string delta, tmax, samples, method, out, format, fock_dim, n, initial, cg, ce, scenario, rtol, atol;
};

void add_flags(CLI::App* sub, Flags& f, bool with_scenario) {
    sub->add_option("--config", f.config, "key = value file, or a CSV/JSON written by jcdiss");
    sub->add_option("--ratio", f.ratios, "gamma/g or kappa/g values (repeat or comma-separate)")->delimiter(',');
    sub->add_option("--delta", f.delta, "detuning delta/g");
    sub->add_option("--tmax", f.tmax, "end of the time grid in units of 1/g");
    sub->add_option("--samples", f.samples, "number of grid points (>= 2)");
    sub->add_option("--method", f.method, "exact | oracle | both");
    sub->add_option("--out", f.out, "output file (default: stdout)");
    sub->add_option("--format", f.format, "csv | json");
    sub->add_option("--fock-dim", f.fock_dim, "oracle Fock truncation (photon numbers 0..fock_dim-1)");
    sub->add_option("--n", f.n, "excitation number of the initial state |e, n-1> (dephasing)");
    sub->add_option("--initial", f.initial, "excited | amplitudes");
    sub->add_option("--cg", f.cg, "ground amplitude 're,im' (with --initial amplitudes)");
    sub->add_option("--ce", f.ce, "excited amplitude 're,im' (with --initial amplitudes)");
    sub->add_option("--rtol", f.rtol, "oracle relative tolerance");
    sub->add_option("--atol", f.atol, "oracle absolute tolerance");
    if (with_scenario)
        sub->add_option("--scenario", f.scenario, "dephasing | loss");
}

jcdiss::RunConfig build_config(jcdiss::Command command, const Flags& f) {
    using jcdiss::RunConfig;
    RunConfig cfg = RunConfig::defaults(command);
    if (!f.config.empty()) {
        cfg = jcdiss::load_config_file(f.config, cfg);
        if (cfg.command != command)
            throw jcdiss::ValidationError("config file is for '" + jcdiss::to_string(cfg.command) +
                                          "', not '" + jcdiss::to_string(command) + "'");
    }
    const std::vector<std::pair<const char*, const std::string*>> scalar{
        {"scenario", &f.scenario}, {"delta", &f.delta},     {"tmax", &f.tmax},     {"samples", &f.samples},
        {"method", &f.method},     {"format", &f.format},   {"fock_dim", &f.fock_dim}, {"n", &f.n},
        {"initial", &f.initial},   {"cg", &f.cg},           {"ce", &f.ce},         {"rtol", &f.rtol},
        {"atol", &f.atol},         {"out", &f.out}};
    for (const auto& [key, value] : scalar)
        if (!value->empty())
            cfg.set(key, *value);
    if (!f.ratios.empty()) {
        std::string joined;
        for (const auto& r : f.ratios)
            joined += (joined.empty() ? "" : ",") + r;
        cfg.set("ratio", joined);
    }
    cfg.validate();
    return cfg;
}

void emit(const jcdiss::TimeSeries& table, const jcdiss::RunConfig& cfg) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!cfg.out.empty()) {
        file.open(cfg.out);
        if (!file)
            throw jcdiss::ValidationError("cannot write '" + cfg.out + "'");
        os = &file;
    }
    if (cfg.format == jcdiss::Format::Csv)
        jcdiss::write_csv(*os, table, cfg);
    else
        jcdiss::write_json(*os, table, cfg);
}

int run(jcdiss::Command command, const Flags& flags) {
    const auto cfg = build_config(command, flags);
    switch (command) {
    case jcdiss::Command::Fig2:
    case jcdiss::Command::Fig3: {
        const auto result = command == jcdiss::Command::Fig2 ? jcdiss::run_figure2(cfg) : jcdiss::run_figure3(cfg);
        for (const auto& w : result.warnings)
            std::cerr << "warning: " << w << '\n';
        emit(jcdiss::merge_series(result.series, cfg.ratios), cfg);
        return 0;
    }
    case jcdiss::Command::Spectrum:
        emit(jcdiss::run_spectrum_sweep(cfg), cfg);
        return 0;
    case jcdiss::Command::Validate: {
        const auto checks = jcdiss::run_validation(cfg);
        bool ok = true;
        for (const auto& c : checks) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << jcdiss::format_double(c.value)
                      << " (tol " << jcdiss::format_double(c.tolerance) << ")\n";
            ok = ok && c.pass;
        }
        std::cout << (ok ? "all checks passed" : "some checks failed") << '\n';
        return ok ? 0 : kExitNumerical;
    }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and brute-force dynamics of a qubit coupled to a dephasing or lossy cavity"};
    app.require_subcommand(1);
    std::map<jcdiss::Command, Flags> flags;
    const std::vector<std::tuple<jcdiss::Command, const char*, const char*, bool>> subs{
        {jcdiss::Command::Fig2, "fig2", "purity and p_e vs time for cavity dephasing (gamma/g sweep)", false},
        {jcdiss::Command::Fig3, "fig3", "purity and p_e vs time for cavity photon loss (kappa/g sweep)", false},
        {jcdiss::Command::Spectrum, "spectrum", "closed-form eigenvalues and residuals vs ratio", true},
        {jcdiss::Command::Validate, "validate", "cross-check closed forms against the oracle", false}};
    std::map<CLI::App*, jcdiss::Command> by_app;
    for (const auto& [cmd, name, help, with_scenario] : subs) {
        auto* sub = app.add_subcommand(name, help);
        add_flags(sub, flags[cmd], with_scenario);
        by_app[sub] = cmd;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        for (const auto& [sub, cmd] : by_app)
            if (sub->parsed())
                return run(cmd, flags[cmd]);
    } catch (const jcdiss::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const jcdiss::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
