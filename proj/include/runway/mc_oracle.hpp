#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "runway/cost_model.hpp"
#include "runway/demand_model.hpp"

namespace runway {

struct SimConfig {
    double dt = 1.0 / 250.0;     ///< years
    double horizon = 200.0;      ///< years
    std::uint64_t n_paths = 200000;
    std::uint64_t seed = 20240607;

    void validate() const;
    std::uint64_t steps() const;

    bool operator==(const SimConfig&) const = default;
};

struct DemandPath {
    std::vector<double> demand;   ///< demand at t_i = i * dt, i = 0..steps
    std::uint64_t jump_count = 0;
};

/// One path of the jump-diffusion. The random stream depends only on
/// (cfg.seed, path_index), so any path can be regenerated in isolation.
DemandPath simulate_path(const DemandParams& demand, double q0, const SimConfig& cfg,
                         std::uint64_t path_index);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
    double truncation_bound = 0.0;   ///< max|dC| e^{-rho horizon} / rho
};

/// Monte Carlo estimate of E[ integral_0^horizon dC(Q(t), dK) e^{-rho t} dt | Q(0) = q ]
/// with trapezoidal accumulation on the simulation grid.
McEstimate mc_value(double q, double dK, const CostParams& cost, const DemandParams& demand,
                    const CapacitySpec& capacity, const SimConfig& cfg, unsigned workers = 0);

struct PanelPoint {
    double q = 0.0;
    double dK = 0.0;
};

/// mc_value for several (q, dK) points at once. Every point is scored along the
/// same simulated paths (common random numbers), so each estimate equals the
/// one mc_value returns for that point alone.
std::vector<McEstimate> mc_values(std::span<const PanelPoint> points, const CostParams& cost,
                                  const DemandParams& demand, const CapacitySpec& capacity,
                                  const SimConfig& cfg, unsigned workers = 0);

/// Sum in a fixed pairwise order.
double pairwise_sum(std::span<const double> values);

struct OracleRow {
    PanelPoint point;
    double closed_form = 0.0;
    McEstimate estimate;
    double z = 0.0;     ///< signed, after absorbing the truncation bound
    bool pass = false;
};

struct OracleReport {
    std::vector<OracleRow> rows;

    bool all_pass() const;
};

using ClosedForm = std::function<double(double q, double dK)>;

/// Scores one closed-form value against a Monte Carlo estimate.
OracleRow score_against_estimate(PanelPoint point, double closed_form, const McEstimate& estimate,
                                 double z_limit = 3.0);

/// Closed form used by default: the deterministic model when sigma == lambda == 0,
/// the stochastic one otherwise.
ClosedForm default_closed_form(const CostParams& cost, const DemandParams& demand,
                               const CapacitySpec& capacity);

OracleReport oracle_compare(std::span<const PanelPoint> panel, const CostParams& cost,
                            const DemandParams& demand, const CapacitySpec& capacity,
                            const SimConfig& cfg, unsigned workers = 0,
                            const ClosedForm& closed_form = {});

/// CSV: q,dK,closed_form,mc_mean,std_error,truncation_bound,z,pass
void write_oracle_csv(std::ostream& out, const OracleReport& report);

}  // namespace runway
