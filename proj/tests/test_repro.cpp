#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "jcdiss/loss.hpp"
#include "jcdiss/repro.hpp"

using namespace jcdiss;

namespace {

RunConfig config(Command c, std::vector<double> ratios) {
    RunConfig cfg = RunConfig::defaults(c);
    cfg.ratios = std::move(ratios);
    return cfg;
}

} // namespace

TEST_CASE("defaults per command") {
    const auto f2 = RunConfig::defaults(Command::Fig2);
    CHECK(f2.scenario == Scenario::Dephasing);
    CHECK(f2.delta_over_g == 0);
    CHECK(f2.ratios == std::vector<double>{1, 10, 100, 1000});
    const auto f3 = RunConfig::defaults(Command::Fig3);
    CHECK(f3.scenario == Scenario::Loss);
    CHECK(f3.delta_over_g == 0.8);
    CHECK(RunConfig::defaults(Command::Validate).method == Method::Both);
    const auto grid = f2.time_grid();
    CHECK(grid.size() == 200);
    CHECK(grid.front() == 0);
    CHECK(grid.back() == 10);
}

TEST_CASE("config validation") {
    RunConfig cfg = RunConfig::defaults(Command::Fig3);
    CHECK_NOTHROW(cfg.validate());
    cfg.samples = 1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = RunConfig::defaults(Command::Fig3);
    cfg.ratios = {};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.ratios = {1, -2};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = RunConfig::defaults(Command::Fig3);
    cfg.initial = InitialKind::Amplitudes;
    cfg.c_g = 0.6;
    cfg.c_e = 0.6;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.c_e = std::complex<double>(0, 0.8);
    CHECK_NOTHROW(cfg.validate());
    cfg.scenario = Scenario::Dephasing;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = RunConfig::defaults(Command::Fig2);
    cfg.excitation = 5;
    cfg.method = Method::Both;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);

    CHECK_THROWS_AS(cfg.set("ratio", "1,abc"), ValidationError);
    CHECK_THROWS_AS(cfg.set("samples", "2.5"), ValidationError);
    CHECK_THROWS_AS(cfg.set("method", "fast"), ValidationError);
    CHECK_THROWS_AS(cfg.set("colour", "red"), ValidationError);
    CHECK_THROWS_AS(cfg.set("ce", "1,2,3"), ValidationError);
}

TEST_CASE("config echo round-trips through set") {
    RunConfig cfg = RunConfig::defaults(Command::Fig3);
    cfg.ratios = {0.5, 3, 1e4};
    cfg.delta_over_g = 0.1 + 0.2;
    cfg.samples = 17;
    cfg.initial = InitialKind::Amplitudes;
    cfg.c_g = {0.6, 0};
    cfg.c_e = {0, 0.8};
    cfg.method = Method::Oracle;
    cfg.format = Format::Json;
    RunConfig back = RunConfig::defaults(Command::Spectrum);
    for (const auto& [k, v] : cfg.echo())
        back.set(k, v);
    CHECK(back.echo() == cfg.echo());
    CHECK(back.delta_over_g == cfg.delta_over_g);
    CHECK(back.ratios == cfg.ratios);
    CHECK(back.c_e == cfg.c_e);
}

TEST_CASE("config text formats") {
    const auto plain = parse_config_text("# comment\nratio = 1, 10\n\ndelta=0.5\n");
    REQUIRE(plain.size() == 2);
    CHECK(plain[0] == std::pair<std::string, std::string>{"ratio", "1, 10"});
    CHECK_THROWS_AS(parse_config_text("ratio 1\n"), ValidationError);

    const auto csv = parse_config_text("# jcdiss 0.1.0\n# config.samples = 5\n# meta.ratio = 1\nt_over_g,p_e\n0,1\n");
    REQUIRE(csv.size() == 1);
    CHECK(csv[0].first == "samples");

    const auto json = parse_config_text(R"({"config": {"tmax": "4", "samples": 9}, "columns": {}})");
    REQUIRE(json.size() == 2);
    CHECK(std::count(json.begin(), json.end(), std::pair<std::string, std::string>{"samples", "9"}) == 1);
    CHECK(std::count(json.begin(), json.end(), std::pair<std::string, std::string>{"tmax", "4"}) == 1);
    CHECK_THROWS_AS(parse_config_text("{\"columns\": {}}"), ValidationError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/jcdiss.cfg", RunConfig{}), ValidationError);
}

TEST_CASE("figure 2 data") {
    auto cfg = config(Command::Fig2, {1, 1000});
    const auto result = run_figure2(cfg);
    REQUIRE(result.series.size() == 2);

    // gamma/g = 1: eta_1 = 16, the population oscillates.
    CHECK(result.series[0].metadata.at("eta") == "16");
    const auto& pe = result.series[0].column("p_e");
    bool min_then_max = false;
    std::size_t first_min = 0;
    for (std::size_t k = 1; k + 1 < pe.size() && !first_min; ++k)
        if (pe[k] < pe[k - 1] && pe[k] <= pe[k + 1])
            first_min = k;
    for (std::size_t k = first_min + 1; first_min && k + 1 < pe.size(); ++k)
        if (pe[k] > pe[k - 1] && pe[k] >= pe[k + 1])
            min_then_max = true;
    CHECK(min_then_max);

    const auto& ts = result.series[1];
    for (std::size_t k = 0; ts.axis[k] <= 1.0; ++k)
        CHECK(ts.column("purity")[k] > 0.99);

    cfg.scenario = Scenario::Loss;
    CHECK_THROWS_AS(run_figure2(cfg), ValidationError);
}

TEST_CASE("figure 3 data") {
    auto cfg = config(Command::Fig3, {1, 1000});
    cfg.t_max_over_g = 10;
    const auto result = run_figure3(cfg);
    CHECK(result.warnings.empty());
    const auto& pur = result.series[0].column("purity");
    const auto dip = std::min_element(pur.begin(), pur.end());
    CHECK(*dip < 0.6);
    CHECK(*std::max_element(dip, pur.end()) > 0.9);
    ModelParams<double> p;
    p.delta = 0.8;
    p.kappa = 1000;
    CHECK(std::norm(loss_f(p, 1.0)) > 0.99);

    auto late = config(Command::Fig3, {1, 10, 100, 1000});
    late.t_max_over_g = 20000;
    late.samples = 2;
    for (const auto& s : run_figure3(late).series)
        CHECK(s.column("p_e").back() < 1e-6);
}

TEST_CASE("exceptional point warning") {
    auto cfg = config(Command::Fig3, {4});
    cfg.delta_over_g = 0;
    const auto result = run_figure3(cfg);
    CHECK(result.warnings.size() == 1);
    CHECK(result.series[0].column("p_e")[0] == doctest::Approx(1.0));
}

TEST_CASE("exact and oracle columns together") {
    for (const Command c : {Command::Fig2, Command::Fig3}) {
        auto cfg = config(c, {10});
        cfg.samples = 21;
        cfg.method = Method::Both;
        const auto r = c == Command::Fig2 ? run_figure2(cfg) : run_figure3(cfg);
        const auto& ts = r.series[0];
        for (const char* col : {"p_e", "purity", "p_e_oracle", "purity_oracle", "max_dev"})
            CHECK(ts.has_column(col));
        CHECK(*std::max_element(ts.column("max_dev").begin(), ts.column("max_dev").end()) < 1e-6);
        CHECK(ts.metadata.count("oracle_truncation_leakage"));

        cfg.method = Method::Oracle;
        const auto o = c == Command::Fig2 ? run_figure2(cfg) : run_figure3(cfg);
        CHECK(o.series[0].has_column("p_e"));
        CHECK_FALSE(o.series[0].has_column("max_dev"));
    }
}

TEST_CASE("spectrum sweep") {
    auto cfg = config(Command::Spectrum, {1, 10, 100, 1000, 10000});
    const auto ts = run_spectrum_sweep(cfg);
    CHECK(ts.axis_name == "ratio");
    const auto& lp = ts.column("l_plus_re");
    const auto& lm = ts.column("l_minus_re");
    const std::size_t last = ts.axis.size() - 1;
    CHECK(std::abs(lp[last]) < 1e-3);
    CHECK(lm[last] / -1e4 == doctest::Approx(1.0).epsilon(1e-3));
    // |l+| ~ 4 g^2 n / gamma: doubling gamma halves it.
    auto doubled = config(Command::Spectrum, {1000, 2000});
    const auto d = run_spectrum_sweep(doubled);
    CHECK(d.column("l_plus_re")[1] / d.column("l_plus_re")[0] == doctest::Approx(0.5).epsilon(1e-4));
    for (std::size_t i = 0; i < ts.axis.size(); ++i) {
        CHECK(ts.column("residual_block")[i] < 1e-9 * std::max(1.0, ts.axis[i]));
        CHECK(ts.column("residual_full")[i] < 1e-8 * std::max(1.0, ts.axis[i]));
    }

    cfg.scenario = Scenario::Loss;
    cfg.delta_over_g = 0.8;
    const auto loss = run_spectrum_sweep(cfg);
    for (std::size_t i = 0; i < loss.axis.size(); ++i) {
        CHECK(loss.column("residual_block")[i] < 1e-9 * std::max(1.0, loss.axis[i]));
        CHECK(loss.column("residual_full")[i] < 1e-8 * std::max(1.0, loss.axis[i]));
    }
    CHECK(loss.column("eps_1_im").back() == doctest::Approx(loss.column("eps_1_leading_im").back()).epsilon(1e-6));
}

TEST_CASE("validation checks pass") {
    auto cfg = RunConfig::defaults(Command::Validate);
    cfg.samples = 50;
    const auto checks = run_validation(cfg);
    CHECK(checks.size() > 20);
    for (const auto& c : checks) {
        INFO(c.name << " = " << c.value);
        CHECK(c.pass);
    }
}

TEST_CASE("merging and writing") {
    TimeSeries a, b;
    a.axis = b.axis = {0, 0.5};
    a.add_column("p_e", {1, 0.25});
    b.add_column("p_e", {1, 0.5});
    a.metadata["eta"] = "16";
    const auto merged = merge_series({a, b}, {1, 1000});
    CHECK(merged.has_column("p_e_r1"));
    CHECK(merged.has_column("p_e_r1000"));
    CHECK(merged.metadata.at("r1.eta") == "16");
    CHECK_THROWS_AS(merge_series({a, b}, {1}), ValidationError);
    CHECK_THROWS_AS(a.add_column("p_e", {0, 0}), ValidationError);
    CHECK_THROWS_AS(a.add_column("x", {0}), ValidationError);

    RunConfig cfg = RunConfig::defaults(Command::Fig2);
    std::ostringstream csv;
    write_csv(csv, merged, cfg);
    const std::string text = csv.str();
    CHECK(text.find("# config.command = fig2\n") != std::string::npos);
    CHECK(text.find("t_over_g,p_e_r1,p_e_r1000\n") != std::string::npos);
    CHECK(text.find("0.5,0.25,0.5\n") != std::string::npos);
    CHECK(format_double(0.1) == "0.10000000000000001");

    std::ostringstream js;
    write_json(js, merged, cfg);
    const auto doc = nlohmann::json::parse(js.str());
    CHECK(doc["config"]["command"] == "fig2");
    CHECK(doc["columns"]["t_over_g"].size() == 2);
    CHECK(doc["columns"]["p_e_r1000"][1] == 0.5);
    CHECK(doc["provenance"]["tool"] == "jcdiss");
    CHECK(doc["provenance"].contains("generated_at"));
}
