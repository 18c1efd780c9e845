// repro.hpp: run configuration, figure runners, sweeps and output formats for
// the command-line front end. Everything here works in double precision with
// g = 1, so times are in units of 1/g and rates are ratios to g.

#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "jcdiss/model.hpp"
#include "jcdiss/oracle.hpp"
#include "jcdiss/timeseries.hpp"

namespace jcdiss {

enum class Command { Fig2, Fig3, Spectrum, Validate };
enum class Method { Exact, Oracle, Both };
enum class Format { Csv, Json };
enum class InitialKind { Excited, Amplitudes };

std::string to_string(Command c);
std::string to_string(Method m);
std::string to_string(Format f);

struct RunConfig {
    Command command = Command::Fig2;
    Scenario scenario = Scenario::Dephasing;
    std::vector<double> ratios{1, 10, 100, 1000};  // gamma/g or kappa/g
    double delta_over_g = 0;
    double t_max_over_g = 10;
    int samples = 200;
    InitialKind initial = InitialKind::Excited;
    std::complex<double> c_g{0, 0};
    std::complex<double> c_e{1, 0};
    int excitation = 1;  // n of the initial state |e, n-1> (dephasing)
    int fock_dim = 4;    // oracle truncation
    Method method = Method::Exact;
    Format format = Format::Csv;
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    std::string out;  // empty: standard output

    static RunConfig defaults(Command c);

    void validate() const;

    // Sets one field from its flag/config-file spelling. Unknown keys and
    // malformed values throw ValidationError.
    void set(const std::string& key, const std::string& value);

    // Every field that influences the emitted data, in a fixed order. Feeding
    // these back through set() reproduces the run.
    std::vector<std::pair<std::string, std::string>> echo() const;

    std::vector<double> time_grid() const;
    IntegratorConfig integrator() const;
};

// Reads key = value pairs from a plain config file, from the "# config." lines of
// a CSV written by this tool, or from the "config" object of a JSON output, and
// applies them on top of base.
RunConfig load_config_file(const std::string& path, RunConfig base);
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

struct FigureResult {
    std::vector<TimeSeries> series;  // one per ratio, in the order given
    std::vector<std::string> warnings;
};

FigureResult run_figure2(const RunConfig& cfg);
FigureResult run_figure3(const RunConfig& cfg);
TimeSeries run_spectrum_sweep(const RunConfig& cfg);

struct Check {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool pass = false;
};

std::vector<Check> run_validation(const RunConfig& cfg);

// Joins one series per ratio into a single table; columns of series i get the
// suffix "_r<ratio>" when there is more than one.
TimeSeries merge_series(const std::vector<TimeSeries>& series, const std::vector<double>& ratios);

void write_csv(std::ostream& os, const TimeSeries& table, const RunConfig& cfg);
void write_json(std::ostream& os, const TimeSeries& table, const RunConfig& cfg);
std::string format_double(double x);

} // namespace jcdiss
