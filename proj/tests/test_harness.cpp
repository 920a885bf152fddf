#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "runway/errors.hpp"
#include "runway/harness.hpp"
#include "runway/stochastic_solver.hpp"

using namespace runway;

namespace {

std::string csv_text(const CsvTable& table)
{
    std::ostringstream out;
    table.write(out);
    return out.str();
}

ScenarioConfig sweep_config(std::string param, std::vector<double> values)
{
    ScenarioConfig cfg;
    cfg.sweep = SweepSpec{std::move(param), std::move(values)};
    return cfg;
}

}  // namespace

TEST_CASE("baseline scenarios")
{
    ScenarioConfig cfg;
    cfg.model = ModelKind::deterministic;
    auto det = run_scenario(cfg);
    CHECK(det.invests);
    CHECK(det.q_trigger == doctest::Approx(5.4).epsilon(0.1 / 5.4));
    CHECK(det.dK == 40.0);
    CHECK_FALSE(det.flagged);

    cfg.model = ModelKind::stochastic;
    auto sto = run_scenario(cfg, "base");
    CHECK(sto.scenario == "base");
    CHECK(sto.q_trigger == doctest::Approx(13.7).epsilon(0.2 / 13.7));
    CHECK(sto.dK == 80.0);
    CHECK(sto.option_coefficient > 0.0);
    CHECK_FALSE(sto.flagged);
    CHECK(sto.diagnostics.root_residual_b1 <= 1e-10);
    CHECK(sto.diagnostics.root_residual_b2 <= 1e-10);
    CHECK(std::abs(sto.diagnostics.smooth_pasting_residual) < 1e-4);
    CHECK(sto.diagnostics.boundary_residual < 1e-8);
    CHECK(sto.status() == "ok");
}

TEST_CASE("rho not above eta is rejected with the key")
{
    ScenarioConfig cfg;
    cfg.cost.rho = 0.01;
    try {
        run_scenario(cfg);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key() == "rho");
    }
}

TEST_CASE("tight tolerances flag a row")
{
    Tolerances tol;
    tol.smooth_pasting = 0.0;
    auto row = run_scenario(ScenarioConfig{}, "strict", tol);
    CHECK(row.flagged);
    CHECK(row.status() == "flagged");
}

TEST_CASE("sigma sweep is ordered and monotone")
{
    auto rows = sweep(sweep_config("sigma", {0.02, 0.04, 0.06, 0.08}), 3);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].param == "sigma");
        CHECK(rows[i].swept_value == std::vector<double>{0.02, 0.04, 0.06, 0.08}[i]);
        CHECK(rows[i].error.empty());
        if (i > 0) {
            CHECK(rows[i].q_trigger >= rows[i - 1].q_trigger);
            CHECK(rows[i].dK >= rows[i - 1].dK);
        }
    }
}

TEST_CASE("larger jumps favour smaller expansions")
{
    auto rows = sweep(sweep_config("jump_size", {-0.05, -0.10, -0.15, -0.20}));
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].dK <= rows[i - 1].dK);
}

TEST_CASE("faster growth lowers the trigger between staircase steps")
{
    std::vector<double> etas;
    for (double eta = 0.005; eta < 0.031; eta += 0.0025)
        etas.push_back(eta);
    auto rows = sweep(sweep_config("eta", etas));
    int compared = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].error.empty());
        if (rows[i].dK == rows[i - 1].dK) {
            CHECK(rows[i].q_trigger < rows[i - 1].q_trigger);
            ++compared;
        }
    }
    CHECK(compared > 0);
}

TEST_CASE("a failing sweep point does not stop the sweep")
{
    auto rows = sweep(sweep_config("eta", {0.01, 0.09, 0.02}));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].error.empty());
    CHECK_FALSE(rows[1].error.empty());
    CHECK(rows[1].flagged);
    CHECK(rows[1].status().rfind("error: rho", 0) == 0);
    CHECK(rows[2].error.empty());
    CHECK(std::isnan(rows[1].q_trigger));
}

TEST_CASE("comparative table")
{
    auto rows = comparative_table();
    REQUIRE(rows.size() == 18);
    CHECK(rows[0].K0 == 40.0);
    CHECK(rows[0].eta == 0.01);
    CHECK(rows[0].uncertainty == "low");
    CHECK(rows[17].K0 == 80.0);
    CHECK(rows[17].uncertainty == "high");

    auto find = [&](double K0, double eta, const std::string& level) -> const ResultRow& {
        for (const auto& r : rows)
            if (r.K0 == K0 && r.eta == eta && r.uncertainty == level)
                return r.result;
        throw std::logic_error("missing cell");
    };
    CHECK(find(40, 0.02, "high").q_trigger == doctest::Approx(14.4).epsilon(0.2 / 14.4));
    CHECK(find(40, 0.02, "high").dK == 80.0);
    CHECK(find(80, 0.015, "med").q_trigger == doctest::Approx(23.6).epsilon(0.2 / 23.6));
    CHECK(find(80, 0.015, "med").dK == 80.0);
    CHECK(find(80, 0.02, "med").q_trigger == doctest::Approx(25.4).epsilon(0.2 / 25.4));
    CHECK(find(80, 0.02, "med").dK == 120.0);

    // more uncertainty at the same expansion size means a later trigger
    for (std::size_t i = 0; i < rows.size(); i += 3)
        for (std::size_t k = 1; k < 3; ++k)
            if (rows[i + k].result.dK == rows[i + k - 1].result.dK)
                CHECK(rows[i + k].result.q_trigger > rows[i + k - 1].result.q_trigger);

    auto text = csv_text(table_csv(rows));
    CHECK(text.rfind("K0,eta,uncertainty,q_star,dK_star,q_star_exact\n40,0.01,low,11.3,40,11.3", 0)
          == 0);
}

TEST_CASE("table levels are overridable")
{
    TableSpec spec;
    spec.K0_values = {40.0};
    spec.eta_values = {0.02};
    spec.levels = {{"calm", 0.01, 0.0, -0.1}};
    auto rows = comparative_table(ScenarioConfig{}, spec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].uncertainty == "calm");
    CHECK(rows[0].result.error.empty());
}

TEST_CASE("csv layouts")
{
    auto rows = sweep(sweep_config("sigma", {0.05}));
    auto text = csv_text(sweep_csv(rows));
    CHECK(text.rfind("param,value,q_star,dK_star,A1_bar,residual,q_star_exact,status\n"
                     "sigma,0.05,13.7,80,",
                     0)
          == 0);
    auto solve = csv_text(result_csv({run_scenario(ScenarioConfig{})}));
    CHECK(solve.find("baseline,stochastic,13.7,80,") != std::string::npos);
}

TEST_CASE("option series meets the envelope at the trigger")
{
    auto table = option_series(ScenarioConfig{});
    int triggers = 0;
    for (const auto& row : table.rows) {
        if (row[3] != "1")
            continue;
        ++triggers;
        const double f = std::stod(row[1]);
        const double v = std::stod(row[2]);
        CHECK(std::abs(f - v) < 1e-6 * std::abs(v));
        CHECK(std::stod(row[0]) == doctest::Approx(13.7).epsilon(0.2 / 13.7));
    }
    CHECK(triggers == 1);
    ScenarioConfig det;
    det.model = ModelKind::deterministic;
    CHECK_THROWS_AS(option_series(det), ValidationError);
}

TEST_CASE("envelope is continuous where the best size switches")
{
    ScenarioConfig cfg;
    StochasticModel model(cfg.cost, cfg.demand, cfg.capacity);
    auto table = envelope_series(cfg);
    int switches = 0;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (table.rows[i][2] == table.rows[i - 1][2])
            continue;
        ++switches;
        double lo = std::stod(table.rows[i - 1][0]);
        double hi = std::stod(table.rows[i][0]);
        const double dK_lo = std::stod(table.rows[i - 1][2]);
        for (int k = 0; k < 100; ++k) {
            const double mid = 0.5 * (lo + hi);
            (best_expansion(mid, model).dK == dK_lo ? lo : hi) = mid;
        }
        const double left = best_expansion(lo, model).value;
        const double right = best_expansion(hi, model).value;
        CHECK(std::abs(left - right) <= 1e-9 * std::max(1.0, std::abs(left)));
    }
    CHECK(switches >= 3);
}

TEST_CASE("trigger by size and path series")
{
    auto triggers = trigger_by_size_series(ScenarioConfig{});
    REQUIRE(triggers.rows.size() == 5);
    CHECK(triggers.rows[1][0] == "80");
    CHECK(std::stod(triggers.rows[1][1]) == doctest::Approx(13.67).epsilon(1e-3));

    ScenarioConfig cfg;
    cfg.sim.dt = 0.1;
    cfg.sim.horizon = 100.0;
    auto paths = path_series(cfg, 3, 10);
    CHECK(paths.rows.size() == 3 * 101);
    CHECK(paths.rows[0] == std::vector<std::string>{"0", "0", "10"});
    CHECK_THROWS_AS(path_series(cfg, 1, 0), ValidationError);
}

TEST_CASE("plot files")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "runway_plot_test";
    fs::create_directories(dir);

    CsvTable empty;
    empty.header = {"q", "F_bar", "dK_best"};
    emit_plot_data(empty, dir / "empty.csv");
    std::ifstream in(dir / "empty.csv");
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == "q,F_bar,dK_best\n");

    try {
        emit_plot_data(empty, dir / "missing" / "x.csv");
        FAIL("expected an I/O error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("No such file or directory") != std::string::npos);
    }
    fs::remove_all(dir);

    CHECK(parse_plot_kind("trigger-by-size") == PlotKind::trigger_by_size);
    CHECK_THROWS_AS(parse_plot_kind("pie"), ValidationError);
}

TEST_CASE("csv cells with separators are quoted")
{
    CsvTable table;
    table.header = {"scenario", "status"};
    table.rows.push_back({"K0=40,eta=0.01,low", "error: say \"no\""});
    CHECK(csv_text(table)
          == "scenario,status\n\"K0=40,eta=0.01,low\",\"error: say \"\"no\"\"\"\n");
    CHECK(format_fixed(13.66, 1) == "13.7");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(NAN) == "nan");
}
