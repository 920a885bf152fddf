#include "runway/deterministic_solver.hpp"

#include <cmath>
#include <vector>

#include "runway/errors.hpp"

namespace runway {

double DetValueCoefficients::A2() const
{
    return lower_growth * std::pow(lower, -growth_exponent)
           + upper_growth * std::pow(upper, -growth_exponent);
}

double DetValueCoefficients::operator()(double q) const
{
    if (!std::isfinite(q) || q <= 0.0)
        throw DomainError("demand must be finite and positive");
    if (q >= upper)
        return saturated;
    double upper_term = upper_growth * std::pow(q / upper, growth_exponent);
    if (q < lower) {
        return A1 * std::pow(q, power) + lower_growth * std::pow(q / lower, growth_exponent)
               + upper_term + A3;
    }
    return band_power * std::pow(q, power) + band_linear * q + upper_term + band_constant;
}

DetValueCoefficients det_value_coefficients(double dK, double K0, const CostParams& cost,
                                            double eta, double singular_tolerance)
{
    if (!std::isfinite(eta) || eta <= 0.0)
        throw DomainError("deterministic model needs a positive growth rate eta");
    const double rho = cost.rho;
    const double power = cost.beta + 1.0;
    const double power_gap = eta * power - rho;
    const double linear_gap = eta - rho;
    if (std::abs(power_gap) < singular_tolerance)
        throw SingularParameterError("eta*(beta+1) equals rho; closed form is singular");
    if (std::abs(linear_gap) < singular_tolerance)
        throw SingularParameterError("eta equals rho; closed form is singular");

    const CostDifference rate(dK, K0, cost);
    DetValueCoefficients out;
    out.dK = dK;
    out.lower = rate.lower_boundary();
    out.upper = rate.upper_boundary();
    out.power = power;
    out.growth_exponent = rho / eta;

    if (dK == 0.0) {
        out.A3 = -cost.f;
        out.saturated = -cost.f;
        return out;
    }

    const auto& a = rate.alphas();
    const double K_lo = out.lower;
    const double K_hi = out.upper;
    out.A1 = -a.alpha1 / power_gap;
    out.A3 = a.alpha2 / rho;
    out.lower_growth = (a.alpha1 - a.alpha3) * std::pow(K_lo, power) / power_gap
                       - a.alpha4 * K_lo / linear_gap + (a.alpha5 - a.alpha2) / rho;
    out.upper_growth = a.alpha3 * std::pow(K_hi, power) / power_gap
                       + a.alpha4 * K_hi / linear_gap + (a.alpha6 - a.alpha5) / rho;
    out.band_power = -a.alpha3 / power_gap;
    out.band_linear = -a.alpha4 / linear_gap;
    out.band_constant = a.alpha5 / rho;
    out.saturated = a.alpha6 / rho;
    return out;
}

double det_value(double q, double dK, double K0, const CostParams& cost, double eta)
{
    return det_value_coefficients(dK, K0, cost, eta)(q);
}

namespace {

void validate_inputs(const CostParams& cost, const DemandParams& demand,
                     const CapacitySpec& capacity)
{
    cost.validate();
    demand.validate();
    capacity.validate();
    if (!(cost.rho > demand.eta))
        throw ValidationError("rho", "discount rate must exceed the growth rate eta");
}

// First q on the grid (refined by bisection) where saving(q) >= 0.
template <class Saving>
std::optional<double> first_non_negative(Saving&& saving, const CapacitySpec& capacity,
                                         const SearchOptions& options)
{
    const double q_max = 2.0 * (capacity.K0 + capacity.max_expansion());
    const auto grid = log_grid(options.q_min, q_max, options.npv_grid_points);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (saving(grid[i]) < 0.0)
            continue;
        if (i == 0)
            return grid[0];
        return bisect_first_true([&](double q) { return saving(q) >= 0.0; }, grid[i - 1],
                                 grid[i], options.npv_tolerance);
    }
    return std::nullopt;
}

}  // namespace

std::optional<NpvDecision> npv_trigger(const CostParams& cost, const DemandParams& demand,
                                       const CapacitySpec& capacity,
                                       const SearchOptions& options)
{
    validate_inputs(cost, demand, capacity);
    std::vector<DetValueCoefficients> branches;
    for (double dK : capacity.expansion_grid())
        branches.push_back(
            det_value_coefficients(dK, capacity.K0, cost, demand.eta, options.singular_tolerance));

    auto best = [&](double q) {
        NpvDecision d{q, branches.front().dK};
        double best_value = branches.front()(q);
        for (const auto& branch : branches) {
            double value = branch(q);
            if (value > best_value) {
                best_value = value;
                d.dK_npv = branch.dK;
            }
        }
        return std::pair{d, best_value};
    };

    auto q = first_non_negative([&](double x) { return best(x).second; }, capacity, options);
    if (!q)
        return std::nullopt;
    return best(*q).first;
}

std::optional<double> npv_trigger_for_size(double dK, const CostParams& cost,
                                           const DemandParams& demand,
                                           const CapacitySpec& capacity,
                                           const SearchOptions& options)
{
    validate_inputs(cost, demand, capacity);
    auto branch =
        det_value_coefficients(dK, capacity.K0, cost, demand.eta, options.singular_tolerance);
    return first_non_negative(branch, capacity, options);
}

}  // namespace runway
