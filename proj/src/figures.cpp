#include <algorithm>
#include <cmath>
#include <future>

#include "jcdiss/dephasing.hpp"
#include "jcdiss/loss.hpp"
#include "jcdiss/repro.hpp"
#include "jcdiss/spectral_match.hpp"

namespace jcdiss {

namespace {

constexpr double kPurityBand = 1e-9;

ModelParams<double> params_for(const RunConfig& cfg, double ratio) {
    ModelParams<double> p;
    p.g = 1;
    p.delta = cfg.delta_over_g;
    if (cfg.scenario == Scenario::Dephasing)
        p.gamma = ratio;
    else
        p.kappa = ratio;
    p.dims = HilbertDims(cfg.fock_dim);
    return p;
}

SingleExcitationState<double> initial_amplitudes(const RunConfig& cfg) {
    if (cfg.initial == InitialKind::Excited)
        return {};
    return {cfg.c_g, cfg.c_e};
}

CVector<double> initial_ket(const RunConfig& cfg, const HilbertDims& dims) {
    if (cfg.scenario == Scenario::Dephasing)
        return basis_ket<double>(dims, kExcited, cfg.excitation - 1);
    const auto amp = initial_amplitudes(cfg);
    return amp.c_g * basis_ket<double>(dims, kGround, 0) + amp.c_e * basis_ket<double>(dims, kExcited, 0);
}

void check_purity_band(const TimeSeries& ts, const std::string& column, double ratio) {
    for (const double p : ts.column(column))
        if (p < 0.5 - kPurityBand || p > 1 + kPurityBand)
            throw NumericalError("purity " + format_double(p) + " left [0.5, 1] at ratio " + format_double(ratio));
}

template <typename Fn>
auto for_each_ratio(const std::vector<double>& ratios, Fn&& fn) {
    using Result = decltype(fn(0.0));
    std::vector<std::future<Result>> jobs;
    for (const double r : ratios)
        jobs.push_back(std::async(std::launch::async, [&fn, r] { return fn(r); }));
    std::vector<Result> out;
    for (auto& j : jobs)
        out.push_back(j.get());
    return out;
}

// Builds the per-ratio table from an optional exact and an optional oracle run.
TimeSeries combine(double ratio, const TimeSeries* exact, const OracleObservables<double>* oracle) {
    TimeSeries ts;
    ts.axis = exact ? exact->axis : oracle->series.axis;
    ts.metadata["ratio"] = format_double(ratio);
    if (exact)
        for (const auto& [name, values] : exact->columns)
            ts.add_column(name, values);
    if (oracle) {
        const std::string suffix = exact ? "_oracle" : "";
        ts.add_column("p_e" + suffix, oracle->series.column("p_e"));
        ts.add_column("purity" + suffix, oracle->series.column("purity"));
        ts.metadata["oracle_steps"] = std::to_string(oracle->stats.accepted);
        ts.metadata["oracle_truncation_leakage"] = format_double(oracle->truncation.leakage);
        ts.metadata["oracle_max_trace_error"] = format_double(oracle->cptp.max_trace_error);
        ts.metadata["oracle_max_hermiticity_error"] = format_double(oracle->cptp.max_hermiticity_error);
        ts.metadata["oracle_min_eigenvalue"] = format_double(oracle->cptp.min_eigenvalue);
    }
    if (exact && oracle) {
        std::vector<double> dev(ts.axis.size());
        const auto& pe = exact->column("p_e");
        const auto& pur = exact->column("purity");
        const auto& pe_o = oracle->series.column("p_e");
        const auto& pur_o = oracle->series.column("purity");
        for (std::size_t i = 0; i < dev.size(); ++i)
            dev[i] = std::max(std::abs(pe[i] - pe_o[i]), std::abs(pur[i] - pur_o[i]));
        ts.add_column("max_dev", std::move(dev));
    }
    if (ts.has_column("purity"))
        check_purity_band(ts, "purity", ratio);
    if (ts.has_column("purity_oracle"))
        check_purity_band(ts, "purity_oracle", ratio);
    return ts;
}

} // namespace

FigureResult run_figure2(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.scenario != Scenario::Dephasing)
        throw ValidationError("run_figure2 needs the dephasing scenario");
    const auto grid = cfg.time_grid();
    const auto n = static_cast<Index>(cfg.excitation);
    FigureResult result;
    result.series = for_each_ratio(cfg.ratios, [&](double ratio) {
        const auto p = params_for(cfg, ratio);
        std::optional<TimeSeries> exact;
        std::optional<OracleObservables<double>> oracle;
        if (cfg.method != Method::Oracle)
            exact = atom_observables_dephasing<double>(p, n, grid);
        if (cfg.method != Method::Exact)
            oracle = atom_observables_oracle<double>(liouvillian(p, Scenario::Dephasing), p.dims,
                                                     initial_ket(cfg, p.dims), grid, cfg.integrator());
        auto ts = combine(ratio, exact ? &*exact : nullptr, oracle ? &*oracle : nullptr);
        ts.metadata["eta"] = format_double(dephasing_eta(p, n));
        return ts;
    });
    return result;
}

FigureResult run_figure3(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.scenario != Scenario::Loss)
        throw ValidationError("run_figure3 needs the loss scenario");
    const auto grid = cfg.time_grid();
    const auto amp = initial_amplitudes(cfg);
    FigureResult result;
    for (const double ratio : cfg.ratios) {
        const auto p = params_for(cfg, ratio);
        if (near_exceptional_point(p, 1))
            result.warnings.push_back("kappa/g = " + format_double(ratio) + ", delta/g = " +
                                      format_double(cfg.delta_over_g) +
                                      " is within 1e-6 of the exceptional point chi_1 = -1; "
                                      "using the confluent propagator");
    }
    result.series = for_each_ratio(cfg.ratios, [&](double ratio) {
        const auto p = params_for(cfg, ratio);
        std::optional<TimeSeries> exact;
        std::optional<OracleObservables<double>> oracle;
        if (cfg.method != Method::Oracle)
            exact = atom_observables_loss<double>(p, amp, grid);
        if (cfg.method != Method::Exact)
            oracle = atom_observables_oracle<double>(liouvillian(p, Scenario::Loss), p.dims,
                                                     initial_ket(cfg, p.dims), grid, cfg.integrator());
        auto ts = combine(ratio, exact ? &*exact : nullptr, oracle ? &*oracle : nullptr);
        const auto chi = k_block(p, 1).chi;
        ts.metadata["chi_1"] = format_double(chi.real()) + "," + format_double(chi.imag());
        return ts;
    });
    return result;
}

namespace {

std::vector<std::complex<double>> to_vector(const std::array<std::complex<double>, 4>& a) { return {a.begin(), a.end()}; }

TimeSeries dephasing_spectrum(const RunConfig& cfg) {
    const auto n = static_cast<Index>(cfg.excitation);
    const bool resonant = cfg.delta_over_g == 0;
    const std::vector<std::string> names = resonant ? std::vector<std::string>{"l_1", "l_plus", "l_minus"}
                                                    : std::vector<std::string>{"z_1", "z_plus", "z_minus"};
    TimeSeries ts;
    ts.axis_name = "ratio";
    std::vector<std::vector<double>> cols(12);
    for (const double ratio : cfg.ratios) {
        const auto p = params_for(cfg, ratio);
        const auto ev = resonant ? eigenvalues_resonant(p, n) : eigenvalues_general(p, n);
        const auto closed = to_vector(ev.values());

        Eigen::ComplexEigenSolver<CMatrix4<double>> es(block_matrix(p, n).L4, false);
        std::vector<std::complex<double>> block(es.eigenvalues().data(), es.eigenvalues().data() + 4);
        const auto full = superop_spectrum(liouvillian(p, Scenario::Dephasing));

        const double leading = -4.0 * p.g * p.g * static_cast<double>(n) / p.gamma;
        ts.axis.push_back(ratio);
        cols[0].push_back(dephasing_eta(p, n));
        const std::array<std::complex<double>, 3> shown{ev.l1, ev.l_plus, ev.l_minus};
        for (int i = 0; i < 3; ++i) {
            cols[1 + 2 * i].push_back(shown[i].real());
            cols[2 + 2 * i].push_back(shown[i].imag());
        }
        cols[7].push_back(leading);
        cols[8].push_back(resonant ? std::abs(ev.l_plus - leading) / std::abs(leading)
                                   : std::numeric_limits<double>::quiet_NaN());
        cols[9].push_back(multiset_distance<double>(closed, block));
        cols[10].push_back(containment_distance<double>(closed, full));
        cols[11].push_back(static_cast<double>(cfg.fock_dim));
    }
    ts.add_column("eta", std::move(cols[0]));
    for (int i = 0; i < 3; ++i) {
        ts.add_column(names[static_cast<std::size_t>(i)] + "_re", std::move(cols[1 + 2 * i]));
        ts.add_column(names[static_cast<std::size_t>(i)] + "_im", std::move(cols[2 + 2 * i]));
    }
    ts.add_column("leading_order_l_plus", std::move(cols[7]));
    ts.add_column("rel_dev_leading_order", std::move(cols[8]));
    ts.add_column("residual_block", std::move(cols[9]));
    ts.add_column("residual_full", std::move(cols[10]));
    ts.add_column("fock_dim", std::move(cols[11]));
    return ts;
}

TimeSeries loss_spectrum(const RunConfig& cfg) {
    TimeSeries ts;
    ts.axis_name = "ratio";
    std::vector<std::vector<double>> cols(13);
    const Index n_max = cfg.fock_dim - 1;
    for (const double ratio : cfg.ratios) {
        const auto p = params_for(cfg, ratio);
        const auto b = k_block(p, 1);
        const std::complex<double> z(2 * p.delta, p.kappa);
        const std::complex<double> minus_i_half_kappa(0, -p.kappa / 2);
        // eps_j ~ -i kappa/2 + (2 delta + i kappa)/2 (delta_{j,2} + (-1)^j chi/4), n = 1
        const std::complex<double> lead1 = minus_i_half_kappa + z / 2.0 * (-b.chi / 4.0);
        const std::complex<double> lead2 = minus_i_half_kappa + z / 2.0 * (1.0 + b.chi / 4.0);

        Eigen::ComplexEigenSolver<CMatrix<double>> es(b.K, false);
        const std::vector<std::complex<double>> numeric(es.eigenvalues().data(), es.eigenvalues().data() + 2);
        const std::vector<std::complex<double>> closed{b.eps1, *b.eps2};

        std::vector<std::complex<double>> lambdas;
        for (const auto& l : liouvillian_spectrum_loss(p, n_max))
            lambdas.push_back(l.value);
        const auto full = superop_spectrum(liouvillian(p, Scenario::Loss));

        ts.axis.push_back(ratio);
        const std::array<double, 12> row{b.chi.real(),  b.chi.imag(),   b.eps1.real(), b.eps1.imag(),
                                         b.eps2->real(), b.eps2->imag(), lead1.real(),  lead1.imag(),
                                         lead2.real(),  lead2.imag(),
                                         multiset_distance<double>(closed, numeric),
                                         containment_distance<double>(lambdas, full)};
        for (std::size_t i = 0; i < row.size(); ++i)
            cols[i].push_back(row[i]);
        cols[12].push_back(static_cast<double>(cfg.fock_dim));
    }
    const char* names[] = {"chi_1_re",          "chi_1_im",          "eps_1_re",         "eps_1_im",
                           "eps_2_re",          "eps_2_im",          "eps_1_leading_re", "eps_1_leading_im",
                           "eps_2_leading_re",  "eps_2_leading_im",  "residual_block",   "residual_full",
                           "fock_dim"};
    for (std::size_t i = 0; i < cols.size(); ++i)
        ts.add_column(names[i], std::move(cols[i]));
    return ts;
}

} // namespace

TimeSeries run_spectrum_sweep(const RunConfig& cfg) {
    cfg.validate();
    return cfg.scenario == Scenario::Dephasing ? dephasing_spectrum(cfg) : loss_spectrum(cfg);
}

std::vector<Check> run_validation(const RunConfig& base) {
    base.validate();
    std::vector<Check> checks;
    const auto add = [&](std::string name, double value, double tol) {
        checks.push_back({std::move(name), value, tol, value <= tol});
    };
    for (const Scenario s : {Scenario::Dephasing, Scenario::Loss}) {
        RunConfig cfg = base;
        cfg.scenario = s;
        cfg.command = s == Scenario::Dephasing ? Command::Fig2 : Command::Fig3;
        cfg.method = Method::Both;
        if (s == Scenario::Loss)
            cfg.excitation = 1;
        else
            cfg.initial = InitialKind::Excited;
        const auto fig = s == Scenario::Dephasing ? run_figure2(cfg) : run_figure3(cfg);
        const std::string tag = to_string(s);
        for (std::size_t i = 0; i < fig.series.size(); ++i) {
            const auto& ts = fig.series[i];
            const std::string r = "ratio=" + format_double(cfg.ratios[i]);
            const auto& dev = ts.column("max_dev");
            add(tag + " trajectory exact vs oracle " + r, *std::max_element(dev.begin(), dev.end()), 1e-6);
            add(tag + " oracle trace error " + r, std::stod(ts.metadata.at("oracle_max_trace_error")), 1e-9);
            add(tag + " oracle hermiticity error " + r, std::stod(ts.metadata.at("oracle_max_hermiticity_error")),
                1e-10);
            add(tag + " oracle negativity " + r, std::max(0.0, -std::stod(ts.metadata.at("oracle_min_eigenvalue"))),
                1e-8);
        }
        cfg.command = Command::Spectrum;
        const auto sweep = run_spectrum_sweep(cfg);
        const auto& block = sweep.column("residual_block");
        const auto& full = sweep.column("residual_full");
        for (std::size_t i = 0; i < sweep.axis.size(); ++i) {
            const auto p = params_for(cfg, sweep.axis[i]);
            const double scale = std::max({p.gamma, p.kappa, std::abs(p.delta), p.g * std::sqrt(cfg.excitation)});
            const std::string r = "ratio=" + format_double(sweep.axis[i]);
            add(tag + " closed-form vs block spectrum " + r, block[i] / scale, 1e-9);
            add(tag + " closed-form in full spectrum " + r, full[i], 1e-8 * std::max(1.0, scale));
        }
    }
    return checks;
}

} // namespace jcdiss
