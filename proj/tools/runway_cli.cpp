#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "runway/config.hpp"
#include "runway/csv.hpp"
#include "runway/errors.hpp"
#include "runway/harness.hpp"
#include "runway/mc_oracle.hpp"

namespace fs = std::filesystem;
using namespace runway;

namespace {

constexpr int exit_diagnostics = 1;
constexpr int exit_invalid = 2;
constexpr int exit_runtime = 3;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    unsigned workers = 0;
    std::vector<std::string> settings;
};

ScenarioConfig build_config(const GlobalOptions& opts)
{
    ScenarioConfig config = opts.config_path.empty() ? ScenarioConfig{}
                                                     : load_config(opts.config_path);
    for (const auto& setting : opts.settings) {
        auto eq = setting.find('=');
        if (eq == std::string::npos)
            throw ValidationError(setting, "--set expects key=value");
        apply_setting(config, setting.substr(0, eq), setting.substr(eq + 1));
    }
    if (opts.seed)
        config.sim.seed = *opts.seed;
    return config;
}

void emit(const GlobalOptions& opts, const std::string& name, const CsvTable& table)
{
    if (opts.out_dir.empty()) {
        table.write(std::cout);
        return;
    }
    fs::create_directories(opts.out_dir);
    fs::path path = fs::path(opts.out_dir) / (name + ".csv");
    emit_plot_data(table, path);
    std::cerr << "wrote " << path.string() << '\n';
}

std::vector<PanelPoint> parse_panel(const std::string& text)
{
    std::vector<PanelPoint> panel;
    std::string_view rest = text;
    while (!rest.empty()) {
        auto comma = rest.find(',');
        std::string item(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ValidationError("panel", "expected q:dK pairs, got '" + item + "'");
        try {
            std::size_t used_q = 0, used_k = 0;
            std::string q_text = item.substr(0, colon), k_text = item.substr(colon + 1);
            PanelPoint p{std::stod(q_text, &used_q), std::stod(k_text, &used_k)};
            if (used_q != q_text.size() || used_k != k_text.size())
                throw std::invalid_argument(item);
            panel.push_back(p);
        } catch (const std::logic_error&) {
            throw ValidationError("panel", "'" + item + "' is not a q:dK pair");
        }
    }
    return panel;
}

int report_rows(const std::vector<ResultRow>& rows)
{
    int code = 0;
    for (const auto& r : rows)
        if (r.flagged) {
            std::cerr << r.scenario << ": " << r.status() << '\n';
            code = exit_diagnostics;
        }
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Runway capacity expansion: trigger demand and expansion size"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "key = value scenario file")
        ->check(CLI::ExistingFile);
    app.add_option("--out", opts.out_dir, "directory for CSV output (default: stdout)");
    app.add_option("--seed", opts.seed, "Monte Carlo seed");
    app.add_option("--format", opts.format, "output format")->check(CLI::IsMember({"csv"}));
    app.add_option("--workers", opts.workers, "worker threads, 0 = all cores");
    app.add_option("--set", opts.settings, "override a config key, e.g. --set sigma=0.04");

    auto* solve = app.add_subcommand("solve", "solve one scenario");
    std::string model_name;
    solve->add_option("--model", model_name, "deterministic or stochastic")
        ->check(CLI::IsMember({"deterministic", "stochastic"}));

    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter");
    std::string sweep_param;
    std::string sweep_values;
    sweep_cmd->add_option("--param", sweep_param, "K0, eta, sigma, lambda or jump_size");
    sweep_cmd->add_option("--values", sweep_values, "comma separated values");
    sweep_cmd->add_option("--model", model_name, "deterministic or stochastic")
        ->check(CLI::IsMember({"deterministic", "stochastic"}));

    auto* table_cmd = app.add_subcommand("table", "comparative study over K0, eta, uncertainty");

    auto* simulate = app.add_subcommand("simulate", "write simulated demand paths");
    std::uint64_t sim_paths = 10;
    std::uint64_t stride = 1;
    simulate->add_option("--paths", sim_paths, "number of paths");
    simulate->add_option("--stride", stride, "keep every n-th time step")
        ->check(CLI::PositiveNumber);

    auto* oracle = app.add_subcommand("oracle-check", "closed form against Monte Carlo");
    std::string panel_text = "5:40,10:40,20:80,50:80";
    std::optional<std::uint64_t> oracle_paths;
    oracle->add_option("--panel", panel_text, "q:dK pairs, comma separated");
    oracle->add_option("--paths", oracle_paths, "Monte Carlo paths (overrides mc.paths)");

    auto* plot = app.add_subcommand("plot", "plot-ready series");
    std::string plot_kind = "envelope";
    plot->add_option("--kind", plot_kind, "envelope, trigger-by-size, option or paths")
        ->check(CLI::IsMember({"envelope", "trigger-by-size", "option", "paths"}));
    plot->add_option("--model", model_name, "deterministic or stochastic")
        ->check(CLI::IsMember({"deterministic", "stochastic"}));

    CLI11_PARSE(app, argc, argv);

    try {
        ScenarioConfig config = build_config(opts);
        if (!model_name.empty())
            apply_setting(config, "model", model_name);

        if (*solve) {
            auto row = run_scenario(config);
            emit(opts, "solve", result_csv({row}));
            return report_rows({row});
        }
        if (*sweep_cmd) {
            if (!sweep_param.empty())
                apply_setting(config, "sweep.param", sweep_param);
            if (!sweep_values.empty())
                apply_setting(config, "sweep.values", sweep_values);
            if (!config.sweep)
                throw ValidationError("sweep.param", "give --param and --values or sweep.* keys");
            auto rows = sweep(config, opts.workers);
            emit(opts, "sweep", sweep_csv(rows));
            return report_rows(rows);
        }
        if (*table_cmd) {
            auto rows = comparative_table(config, {}, opts.workers);
            emit(opts, "table", table_csv(rows));
            std::vector<ResultRow> results;
            for (const auto& r : rows)
                results.push_back(r.result);
            return report_rows(results);
        }
        if (*simulate) {
            emit(opts, "paths", path_series(config, sim_paths, stride));
            return 0;
        }
        if (*oracle) {
            if (oracle_paths)
                config.sim.n_paths = *oracle_paths;
            config.validate();
            auto panel = parse_panel(panel_text);
            auto report = oracle_compare(panel, config.cost, config.demand, config.capacity,
                                         config.sim, opts.workers);
            if (opts.out_dir.empty()) {
                write_oracle_csv(std::cout, report);
            } else {
                fs::create_directories(opts.out_dir);
                fs::path path = fs::path(opts.out_dir) / "oracle.csv";
                std::ofstream out(path, std::ios::binary);
                if (!out)
                    throw std::runtime_error("cannot open " + path.string());
                write_oracle_csv(out, report);
                if (!out.flush())
                    throw std::runtime_error("cannot write " + path.string());
                std::cerr << "wrote " << path.string() << '\n';
            }
            for (const auto& row : report.rows)
                if (!row.pass)
                    std::cerr << "oracle mismatch at q=" << row.point.q << " dK=" << row.point.dK
                              << ": z=" << row.z << '\n';
            return report.all_pass() ? 0 : exit_diagnostics;
        }
        if (*plot) {
            auto kind = parse_plot_kind(plot_kind);
            std::string name = "plot_" + plot_kind;
            emit(opts, name, plot_series(kind, config));
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return 0;
}
