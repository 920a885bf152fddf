#include "runway/harness.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>

#include "runway/deterministic_solver.hpp"
#include "runway/errors.hpp"
#include "runway/parallel.hpp"
#include "runway/search.hpp"
#include "runway/stochastic_solver.hpp"

namespace runway {

std::string ResultRow::status() const
{
    if (!error.empty())
        return "error: " + error;
    if (flagged)
        return "flagged";
    return invests ? "ok" : "never";
}

namespace {

double best_det_value(double q, const ScenarioConfig& config)
{
    double best = -std::numeric_limits<double>::infinity();
    for (double dK : config.capacity.expansion_grid())
        best = std::max(best, det_value(q, dK, config.capacity.K0, config.cost,
                                        config.demand.eta));
    return best;
}

void solve_deterministic(const ScenarioConfig& config, ResultRow& row)
{
    auto decision = npv_trigger(config.cost, config.demand, config.capacity);
    if (!decision)
        return;
    row.invests = true;
    row.q_trigger = decision->q_npv;
    row.dK = decision->dK_npv;
    row.value_at_trigger = best_det_value(decision->q_npv, config);
}

void solve_stochastic(const ScenarioConfig& config, ResultRow& row, const Tolerances& tol)
{
    StochasticModel model(config.cost, config.demand, config.capacity);
    auto& diag = row.diagnostics;
    diag.root_residual_b1 = std::abs(model.roots().residual_b1);
    diag.root_residual_b2 = std::abs(model.roots().residual_b2);
    for (const auto& branch : model.branches())
        diag.boundary_residual = std::max(diag.boundary_residual,
                                          branch.boundary_residuals().max());

    auto decision = option_trigger(model);
    if (decision) {
        row.invests = true;
        row.q_trigger = decision->q_star;
        row.dK = decision->dK_star;
        row.option_coefficient = decision->A1_bar;
        row.value_at_trigger = decision->value_at_trigger;
        diag.smooth_pasting_residual = decision->smooth_pasting_residual;
        diag.interior = decision->interior;
    }

    row.flagged = diag.root_residual_b1 > tol.root_residual
                  || diag.root_residual_b2 > tol.root_residual
                  || diag.boundary_residual > tol.boundary_residual
                  || std::abs(diag.smooth_pasting_residual) > tol.smooth_pasting
                  || !diag.interior;
}

std::string cell(double value)
{
    return format_number(value);
}

std::string rounded_q(double q)
{
    return std::isfinite(q) ? format_fixed(q, 1) : format_number(q);
}

}  // namespace

ResultRow run_scenario(const ScenarioConfig& config, std::string scenario_id,
                       const Tolerances& tol)
{
    config.validate();
    ResultRow row;
    row.scenario = std::move(scenario_id);
    row.model = config.model;
    if (config.model == ModelKind::deterministic)
        solve_deterministic(config, row);
    else
        solve_stochastic(config, row, tol);
    return row;
}

std::vector<ResultRow> sweep(const ScenarioConfig& config, unsigned workers,
                             const Tolerances& tol)
{
    if (!config.sweep)
        throw ValidationError("sweep.param", "no sweep specified");
    config.validate();
    const SweepSpec& spec = *config.sweep;

    std::vector<ResultRow> rows(spec.values.size());
    parallel_for(rows.size(), workers, [&](std::size_t i) {
        ResultRow& row = rows[i];
        const double value = spec.values[i];
        const std::string id = spec.param + "=" + format_number(value);
        try {
            ScenarioConfig point = config;
            point.sweep.reset();
            set_sweep_parameter(point, spec.param, value);
            row = run_scenario(point, id, tol);
        } catch (const std::exception& e) {
            row = ResultRow{};
            row.scenario = id;
            row.model = config.model;
            row.error = e.what();
            row.flagged = true;
        }
        row.param = spec.param;
        row.swept_value = value;
    });
    return rows;
}

std::vector<TableRow> comparative_table(const ScenarioConfig& base, const TableSpec& spec,
                                        unsigned workers, const Tolerances& tol)
{
    std::vector<TableRow> rows;
    for (double K0 : spec.K0_values)
        for (double eta : spec.eta_values)
            for (const auto& level : spec.levels)
                rows.push_back({K0, eta, level.name, {}});

    parallel_for(rows.size(), workers, [&](std::size_t i) {
        TableRow& row = rows[i];
        const auto& level = spec.levels[i % spec.levels.size()];
        const std::string id = "K0=" + format_number(row.K0) + ",eta=" + format_number(row.eta)
                               + "," + level.name;
        try {
            ScenarioConfig point = base;
            point.sweep.reset();
            point.model = ModelKind::stochastic;
            point.capacity.K0 = row.K0;
            point.demand.eta = row.eta;
            point.demand.sigma = level.sigma;
            point.demand.lambda = level.lambda;
            point.demand.jump = JumpSpec::constant(level.jump_size);
            row.result = run_scenario(point, id, tol);
        } catch (const std::exception& e) {
            row.result.scenario = id;
            row.result.error = e.what();
            row.result.flagged = true;
        }
    });
    return rows;
}

CsvTable result_csv(const std::vector<ResultRow>& rows)
{
    CsvTable table;
    table.header = {"scenario", "model", "q_trigger", "dK", "option_coefficient",
                    "value_at_trigger", "root_residual_b1", "root_residual_b2",
                    "smooth_pasting_residual", "boundary_residual", "q_trigger_exact",
                    "status"};
    for (const auto& r : rows) {
        const auto& d = r.diagnostics;
        table.rows.push_back({r.scenario, std::string(to_string(r.model)),
                              rounded_q(r.q_trigger), cell(r.dK), cell(r.option_coefficient),
                              cell(r.value_at_trigger), cell(d.root_residual_b1),
                              cell(d.root_residual_b2), cell(d.smooth_pasting_residual),
                              cell(d.boundary_residual), cell(r.q_trigger), r.status()});
    }
    return table;
}

CsvTable sweep_csv(const std::vector<ResultRow>& rows)
{
    CsvTable table;
    table.header = {"param", "value", "q_star", "dK_star", "A1_bar", "residual",
                    "q_star_exact", "status"};
    for (const auto& r : rows)
        table.rows.push_back({r.param, cell(r.swept_value), rounded_q(r.q_trigger), cell(r.dK),
                              cell(r.option_coefficient),
                              cell(r.diagnostics.smooth_pasting_residual), cell(r.q_trigger),
                              r.status()});
    return table;
}

CsvTable table_csv(const std::vector<TableRow>& rows)
{
    CsvTable table;
    table.header = {"K0", "eta", "uncertainty", "q_star", "dK_star", "q_star_exact"};
    for (const auto& r : rows)
        table.rows.push_back({cell(r.K0), cell(r.eta), r.uncertainty,
                              rounded_q(r.result.q_trigger), cell(r.result.dK),
                              cell(r.result.q_trigger)});
    return table;
}

PlotKind parse_plot_kind(std::string_view name)
{
    if (name == "envelope")
        return PlotKind::envelope;
    if (name == "trigger-by-size")
        return PlotKind::trigger_by_size;
    if (name == "option")
        return PlotKind::option;
    if (name == "paths")
        return PlotKind::paths;
    throw ValidationError("kind", "expected envelope, trigger-by-size, option or paths");
}

CsvTable envelope_series(const ScenarioConfig& config, int points)
{
    config.validate();
    const SearchOptions options;
    const double hi = 2.0 * (config.capacity.K0 + config.capacity.max_expansion());
    CsvTable table;
    table.header = {"q", "F_bar", "dK_best"};

    std::optional<StochasticModel> model;
    if (config.model == ModelKind::stochastic)
        model.emplace(config.cost, config.demand, config.capacity);

    for (double q : log_grid(options.q_min, hi, points)) {
        BestExpansion best;
        if (model) {
            best = best_expansion(q, *model);
        } else {
            best.value = -std::numeric_limits<double>::infinity();
            for (double dK : config.capacity.expansion_grid()) {
                double v = det_value(q, dK, config.capacity.K0, config.cost, config.demand.eta);
                if (v > best.value)
                    best = {dK, v};
            }
        }
        table.rows.push_back({cell(q), cell(best.value), cell(best.dK)});
    }
    return table;
}

CsvTable trigger_by_size_series(const ScenarioConfig& config)
{
    config.validate();
    CsvTable table;
    table.header = {"dK", "q_trigger"};
    const auto grid = config.capacity.expansion_grid();

    std::optional<StochasticModel> model;
    if (config.model == ModelKind::stochastic)
        model.emplace(config.cost, config.demand, config.capacity);

    for (double dK : grid) {
        if (dK == 0.0)
            continue;
        double q = ResultRow::nan;
        if (model) {
            if (auto d = option_trigger_for_size(dK, *model))
                q = d->q_star;
        } else if (auto t = npv_trigger_for_size(dK, config.cost, config.demand,
                                                 config.capacity)) {
            q = *t;
        }
        table.rows.push_back({cell(dK), cell(q)});
    }
    return table;
}

CsvTable option_series(const ScenarioConfig& config, int points)
{
    config.validate();
    if (config.model != ModelKind::stochastic)
        throw ValidationError("model", "the option curve needs the stochastic model");
    StochasticModel model(config.cost, config.demand, config.capacity);
    CsvTable table;
    table.header = {"q", "F_bar", "V", "is_trigger"};
    auto decision = option_trigger(model);
    if (!decision)
        return table;

    const double hi = 2.0 * decision->q_star;
    auto grid = log_grid(model.options().q_min, hi, points);
    grid.push_back(decision->q_star);
    std::sort(grid.begin(), grid.end());
    for (double q : grid) {
        const bool trigger = q == decision->q_star;
        table.rows.push_back({cell(q), cell(best_expansion(q, model).value),
                              cell(option_value(q, *decision, model)), trigger ? "1" : "0"});
    }
    return table;
}

CsvTable path_series(const ScenarioConfig& config, std::uint64_t n_paths, std::uint64_t stride)
{
    config.validate();
    if (stride == 0)
        throw ValidationError("stride", "must be at least 1");
    CsvTable table;
    table.header = {"path", "t", "q"};
    for (std::uint64_t p = 0; p < n_paths; ++p) {
        auto path = simulate_path(config.demand, config.q0, config.sim, p);
        for (std::size_t i = 0; i < path.demand.size(); i += stride)
            table.rows.push_back({std::to_string(p), cell(static_cast<double>(i) * config.sim.dt),
                                  cell(path.demand[i])});
    }
    return table;
}

CsvTable plot_series(PlotKind kind, const ScenarioConfig& config)
{
    switch (kind) {
    case PlotKind::envelope:
        return envelope_series(config);
    case PlotKind::trigger_by_size:
        return trigger_by_size_series(config);
    case PlotKind::option:
        return option_series(config);
    case PlotKind::paths:
        return path_series(config, 10, 25);
    }
    throw std::logic_error("unknown plot kind");
}

void emit_plot_data(const CsvTable& table, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
    table.write(out);
    out.flush();
    if (!out)
        throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
}

}  // namespace runway
