#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "runway/config.hpp"
#include "runway/csv.hpp"

namespace runway {

/// Tolerances above which a result row is flagged.
struct Tolerances {
    double root_residual = 1e-10;      ///< |phi(b)| at either root
    double smooth_pasting = 1e-4;      ///< relative slope mismatch at q*
    double boundary_residual = 1e-8;   ///< value/slope matching at the region interfaces
};

struct Diagnostics {
    double root_residual_b1 = 0.0;
    double root_residual_b2 = 0.0;
    double smooth_pasting_residual = 0.0;
    double boundary_residual = 0.0;
    bool interior = true;
};

struct ResultRow {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    std::string scenario;
    std::string param;            ///< swept parameter, empty for a single run
    double swept_value = nan;
    ModelKind model = ModelKind::stochastic;
    bool invests = false;         ///< false: no expansion is ever worth it
    double q_trigger = nan;
    double dK = nan;
    double option_coefficient = nan;
    double value_at_trigger = nan;
    Diagnostics diagnostics;
    bool flagged = false;
    std::string error;            ///< non-empty if the solve threw

    std::string status() const;
};

/// Solves one scenario with the selected model and attaches diagnostics.
/// Validation errors propagate as ValidationError.
ResultRow run_scenario(const ScenarioConfig& config, std::string scenario_id = "baseline",
                       const Tolerances& tol = {});

/// One row per swept value, in input order. A failing point is recorded in
/// its row and the sweep carries on.
std::vector<ResultRow> sweep(const ScenarioConfig& config, unsigned workers = 0,
                             const Tolerances& tol = {});

struct UncertaintyLevel {
    std::string name;
    double sigma;
    double lambda;
    double jump_size;
};

struct TableSpec {
    std::vector<double> K0_values{40.0, 80.0};
    std::vector<double> eta_values{0.01, 0.015, 0.02};
    std::vector<UncertaintyLevel> levels{
        {"low", 0.02, 0.02, -0.10},
        {"med", 0.04, 0.04, -0.15},
        {"high", 0.06, 0.06, -0.20},
    };
};

struct TableRow {
    double K0 = 0.0;
    double eta = 0.0;
    std::string uncertainty;
    ResultRow result;
};

/// Comparative study: every (K0, eta, uncertainty) combination, stochastic
/// model, remaining parameters taken from `base`.
std::vector<TableRow> comparative_table(const ScenarioConfig& base = {},
                                        const TableSpec& spec = {}, unsigned workers = 0,
                                        const Tolerances& tol = {});

/// q values are reported to 0.1 ops/hour; the trailing *_exact column keeps
/// full precision.
CsvTable result_csv(const std::vector<ResultRow>& rows);
CsvTable sweep_csv(const std::vector<ResultRow>& rows);
CsvTable table_csv(const std::vector<TableRow>& rows);

enum class PlotKind { envelope, trigger_by_size, option, paths };

PlotKind parse_plot_kind(std::string_view name);

/// Best value over expansion sizes and the maximising size on a log grid:
/// q,F_bar,dK_best.
CsvTable envelope_series(const ScenarioConfig& config, int points = 400);

/// Trigger demand for each fixed expansion size: dK,q_trigger.
CsvTable trigger_by_size_series(const ScenarioConfig& config);

/// F_bar and V on a grid that contains q* exactly: q,F_bar,V,is_trigger.
/// Stochastic model only.
CsvTable option_series(const ScenarioConfig& config, int points = 400);

/// Simulated demand paths from config.q0, every `stride` steps: path,t,q.
CsvTable path_series(const ScenarioConfig& config, std::uint64_t n_paths,
                     std::uint64_t stride = 1);

CsvTable plot_series(PlotKind kind, const ScenarioConfig& config);

/// Writes the table to `path`; failures are reported with the OS message.
void emit_plot_data(const CsvTable& table, const std::filesystem::path& path);

}  // namespace runway
