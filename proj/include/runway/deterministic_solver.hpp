#pragma once

#include <optional>

#include "runway/cost_model.hpp"
#include "runway/demand_model.hpp"
#include "runway/search.hpp"

namespace runway {

/// Closed-form cumulative cost saving of the deterministic model for one
/// expansion size, F(q) = integral of dC(q e^{eta t}) e^{-rho t} dt.
///
/// Below the lower boundary the saving is A1 q^(beta+1) + A2 q^(rho/eta) + A3.
/// The q^(rho/eta) term is stored split by the boundary it comes from,
/// as lower_growth (q/K0)^(rho/eta) + upper_growth (q/K1)^(rho/eta), which stays
/// finite when rho/eta is large. Starting inside the expanding band only the
/// upper-boundary terms survive; starting above it the saving is alpha6/rho.
struct DetValueCoefficients {
    double dK = 0.0;
    double A1 = 0.0;
    double A3 = 0.0;
    double lower_growth = 0.0;
    double upper_growth = 0.0;

    double band_power = 0.0;     ///< -alpha3 / (eta(beta+1) - rho)
    double band_linear = 0.0;    ///< -alpha4 / (eta - rho)
    double band_constant = 0.0;  ///< alpha5 / rho
    double saturated = 0.0;      ///< alpha6 / rho

    double lower = 0.0;          ///< K0 (times mu)
    double upper = 0.0;          ///< K0 + dK (times mu)
    double power = 0.0;          ///< beta + 1
    double growth_exponent = 0.0;  ///< rho / eta

    /// Raw coefficient of q^(rho/eta) in the below-capacity piece.
    double A2() const;

    double operator()(double q) const;
};

DetValueCoefficients det_value_coefficients(double dK, double K0, const CostParams& cost,
                                            double eta, double singular_tolerance = 1e-9);

double det_value(double q, double dK, double K0, const CostParams& cost, double eta);

struct NpvDecision {
    double q_npv = 0.0;
    double dK_npv = 0.0;
};

/// First demand at which the best expansion has a non-negative saving.
/// std::nullopt means no such demand inside the search range.
std::optional<NpvDecision> npv_trigger(const CostParams& cost, const DemandParams& demand,
                                       const CapacitySpec& capacity,
                                       const SearchOptions& options = {});

/// Same rule with the expansion size fixed at dK.
std::optional<double> npv_trigger_for_size(double dK, const CostParams& cost,
                                           const DemandParams& demand,
                                           const CapacitySpec& capacity,
                                           const SearchOptions& options = {});

}  // namespace runway
