#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jcdiss/repro.hpp"

namespace jcdiss {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw ValidationError("invalid number for '" + key + "': '" + text + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ValidationError("invalid integer for '" + key + "': '" + text + "'");
    return v;
}

std::complex<double> parse_complex(const std::string& key, const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() == 1)
        return {parse_double(key, parts[0]), 0};
    if (parts.size() == 2)
        return {parse_double(key, parts[0]), parse_double(key, parts[1])};
    throw ValidationError("'" + key + "' expects 're' or 're,im', got '" + text + "'");
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            out += ',';
        out += format_double(xs[i]);
    }
    return out;
}

} // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_string(Command c) {
    switch (c) {
    case Command::Fig2: return "fig2";
    case Command::Fig3: return "fig3";
    case Command::Spectrum: return "spectrum";
    case Command::Validate: return "validate";
    }
    return "?";
}

std::string to_string(Method m) {
    switch (m) {
    case Method::Exact: return "exact";
    case Method::Oracle: return "oracle";
    case Method::Both: return "both";
    }
    return "?";
}

std::string to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

RunConfig RunConfig::defaults(Command c) {
    RunConfig cfg;
    cfg.command = c;
    switch (c) {
    case Command::Fig2:
        cfg.scenario = Scenario::Dephasing;
        cfg.delta_over_g = 0;
        break;
    case Command::Fig3:
        cfg.scenario = Scenario::Loss;
        cfg.delta_over_g = 0.8;
        break;
    case Command::Spectrum:
        cfg.scenario = Scenario::Dephasing;
        cfg.ratios = {1, 10, 100, 1000, 10000};
        break;
    case Command::Validate:
        cfg.method = Method::Both;
        break;
    }
    return cfg;
}

void RunConfig::set(const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    const std::string v = trim(value);
    if (key == "command") {
        if (v == "fig2") command = Command::Fig2;
        else if (v == "fig3") command = Command::Fig3;
        else if (v == "spectrum") command = Command::Spectrum;
        else if (v == "validate") command = Command::Validate;
        else throw ValidationError("unknown command '" + v + "'");
    } else if (key == "scenario") {
        if (v == "dephasing") scenario = Scenario::Dephasing;
        else if (v == "loss") scenario = Scenario::Loss;
        else throw ValidationError("scenario must be 'dephasing' or 'loss', got '" + v + "'");
    } else if (key == "ratio") {
        ratios.clear();
        for (const auto& item : split(v, ','))
            if (!item.empty())
                ratios.push_back(parse_double(key, item));
    } else if (key == "delta") {
        delta_over_g = parse_double(key, v);
    } else if (key == "tmax") {
        t_max_over_g = parse_double(key, v);
    } else if (key == "samples") {
        samples = parse_int(key, v);
    } else if (key == "initial") {
        if (v == "excited") initial = InitialKind::Excited;
        else if (v == "amplitudes") initial = InitialKind::Amplitudes;
        else throw ValidationError("initial must be 'excited' or 'amplitudes', got '" + v + "'");
    } else if (key == "cg") {
        c_g = parse_complex(key, v);
    } else if (key == "ce") {
        c_e = parse_complex(key, v);
    } else if (key == "n") {
        excitation = parse_int(key, v);
    } else if (key == "fock_dim") {
        fock_dim = parse_int(key, v);
    } else if (key == "method") {
        if (v == "exact") method = Method::Exact;
        else if (v == "oracle") method = Method::Oracle;
        else if (v == "both") method = Method::Both;
        else throw ValidationError("method must be exact, oracle or both, got '" + v + "'");
    } else if (key == "format") {
        if (v == "csv") format = Format::Csv;
        else if (v == "json") format = Format::Json;
        else throw ValidationError("format must be csv or json, got '" + v + "'");
    } else if (key == "rtol") {
        rel_tol = parse_double(key, v);
    } else if (key == "atol") {
        abs_tol = parse_double(key, v);
    } else if (key == "out") {
        out = v;
    } else {
        throw ValidationError("unknown configuration key '" + key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> kv{
        {"command", to_string(command)},
        {"scenario", to_string(scenario)},
        {"ratio", join_doubles(ratios)},
        {"delta", format_double(delta_over_g)},
        {"tmax", format_double(t_max_over_g)},
        {"samples", std::to_string(samples)},
        {"initial", initial == InitialKind::Excited ? "excited" : "amplitudes"},
    };
    if (initial == InitialKind::Amplitudes) {
        kv.emplace_back("cg", format_double(c_g.real()) + "," + format_double(c_g.imag()));
        kv.emplace_back("ce", format_double(c_e.real()) + "," + format_double(c_e.imag()));
    }
    kv.emplace_back("n", std::to_string(excitation));
    kv.emplace_back("fock_dim", std::to_string(fock_dim));
    kv.emplace_back("method", to_string(method));
    kv.emplace_back("format", to_string(format));
    kv.emplace_back("rtol", format_double(rel_tol));
    kv.emplace_back("atol", format_double(abs_tol));
    return kv;
}

void RunConfig::validate() const {
    if (command == Command::Fig2 && scenario != Scenario::Dephasing)
        throw ValidationError("fig2 is the dephasing scenario; remove 'scenario = loss'");
    if (command == Command::Fig3 && scenario != Scenario::Loss)
        throw ValidationError("fig3 is the loss scenario; remove 'scenario = dephasing'");
    if (ratios.empty())
        throw ValidationError("at least one --ratio is required");
    for (const double r : ratios)
        if (!(r > 0) || !std::isfinite(r))
            throw ValidationError("ratios must be positive and finite, got " + format_double(r));
    if (samples < 2)
        throw ValidationError("--samples must be >= 2");
    if (!(t_max_over_g > 0))
        throw ValidationError("--tmax must be positive");
    if (!(rel_tol > 0) || !(abs_tol > 0))
        throw ValidationError("integrator tolerances must be positive");
    if (excitation < 1)
        throw ValidationError("--n must be >= 1");
    if (fock_dim < 2 || fock_dim > 32)
        throw ValidationError("--fock-dim must lie in [2, 32] (dense superoperators)");
    if (scenario == Scenario::Dephasing && fock_dim < excitation + 1 &&
        (method != Method::Exact || command == Command::Spectrum || command == Command::Validate))
        throw ValidationError("--fock-dim must be at least n + 1 to hold |g, n>");
    if (initial == InitialKind::Amplitudes) {
        const double norm = std::norm(c_g) + std::norm(c_e);
        if (std::abs(norm - 1) > 1e-12)
            throw ValidationError("amplitudes must satisfy |cg|^2 + |ce|^2 = 1, got " + format_double(norm));
        if (scenario == Scenario::Dephasing && std::abs(c_g) != 0)
            throw ValidationError("the dephasing solution covers the initial state |e, n-1> only; use --initial excited");
    }
    if (scenario == Scenario::Loss && excitation != 1)
        throw ValidationError("the loss solution covers one excitation only (n = 1)");
}

std::vector<double> RunConfig::time_grid() const {
    std::vector<double> t(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
        t[static_cast<std::size_t>(i)] = t_max_over_g * static_cast<double>(i) / static_cast<double>(samples - 1);
    t.back() = t_max_over_g;
    return t;
}

IntegratorConfig RunConfig::integrator() const {
    IntegratorConfig ic;
    ic.rel_tol = rel_tol;
    ic.abs_tol = abs_tol;
    return ic;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> kv;
    const std::string trimmed = trim(text);
    if (!trimmed.empty() && trimmed.front() == '{') {
        const auto doc = nlohmann::json::parse(trimmed, nullptr, false);
        if (doc.is_discarded() || !doc.contains("config") || !doc["config"].is_object())
            throw ValidationError("JSON config needs a 'config' object");
        for (const auto& [k, val] : doc["config"].items())
            kv.emplace_back(k, val.is_string() ? val.get<std::string>() : val.dump());
        return kv;
    }
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool embedded = false;
    while (std::getline(is, line)) {
        ++lineno;
        std::string l = trim(line);
        if (l.rfind("# config.", 0) == 0) {
            l = l.substr(9);
            embedded = true;
        } else if (l.empty() || l.front() == '#') {
            continue;
        } else if (embedded) {
            break;  // CSV header: the embedded config has ended
        }
        const auto eq = l.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + " is not 'key = value'");
        kv.emplace_back(trim(l.substr(0, eq)), trim(l.substr(eq + 1)));
    }
    return kv;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto& [k, v] : parse_config_text(ss.str()))
        base.set(k, v);
    return base;
}

} // namespace jcdiss
