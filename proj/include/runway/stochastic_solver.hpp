#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "runway/cost_model.hpp"
#include "runway/demand_model.hpp"
#include "runway/search.hpp"

namespace runway {

/// phi(b) = sigma^2/2 b(b-1) + eta b + lambda E[(1+Z)^b] - (rho + lambda).
double characteristic_phi(double b, const DemandParams& demand, double rho);

/// d phi / d b.
double characteristic_phi_slope(double b, const DemandParams& demand, double rho);

struct RootOptions {
    /// Brackets are grown outward by doubling until |b| exceeds this. Near-zero
    /// volatility pushes b2 towards -2 eta / sigma^2, hence the large default.
    double bracket_limit = 1e15;
};

/// Roots b1 > 1 and b2 < 0 of phi.
struct CharRoots {
    double b1 = 0.0;
    double b2 = 0.0;
    double residual_b1 = 0.0;
    double residual_b2 = 0.0;
};

CharRoots characteristic_roots(const DemandParams& demand, double rho,
                               const RootOptions& options = {});

/// power * q^exponent + linear * q + constant.
struct ParticularSolution {
    double power = 0.0;
    double linear = 0.0;
    double constant = 0.0;
    double exponent = 0.0;

    double value(double q) const;
    double slope(double q) const;
};

struct ParticularCoefficients {
    std::array<ParticularSolution, 3> region;
    double power_denominator = 0.0;   ///< written form; equals phi(beta+1)
    double linear_denominator = 0.0;  ///< written form; equals phi(1)
};

/// Particular solutions of the value equation in the three demand regions.
/// Throws ResonanceError when a denominator is within `resonance_tolerance` of 0.
ParticularCoefficients particular_coefficients(const AlphaCoefficients& alphas,
                                               const DemandParams& demand, double rho,
                                               double beta,
                                               double resonance_tolerance = 1e-9);

/// Jumps in value and slope across the two region boundaries, relative to the
/// local magnitude.
struct BoundaryResiduals {
    double value_lower = 0.0;
    double slope_lower = 0.0;
    double value_upper = 0.0;
    double slope_upper = 0.0;

    double max() const;
};

/// Expected discounted cost saving for one expansion size, piecewise over
/// q < K0, K0 <= q < K0+dK, q >= K0+dK. Each region carries
/// A_{i,1} q^b1 + A_{i,2} q^b2 + particular_i(q), with A_{1,2} = A_{3,1} = 0 and
/// the rest fixed by value and slope continuity at both boundaries.
///
/// Homogeneous terms are stored relative to the boundary they are matched at,
/// e.g. A_{2,2} q^b2 == scaled(2,2) * (q/K0)^b2, so very negative b2 is harmless.
class PiecewiseValue {
public:
    PiecewiseValue(double dK, double K0, const CostParams& cost, const DemandParams& demand,
                   const CharRoots& roots, double resonance_tolerance = 1e-9);

    double value(double q) const;
    double slope(double q) const;

    /// Value and slope of the region-`i` expression (1-based) at any q > 0.
    double value_in(int region, double q) const;
    double slope_in(int region, double q) const;

    /// Raw A_{i,j}; may overflow for extreme roots.
    double coefficient(int region, int j) const;

    /// A_{i,j} times anchor^b_j, the form used for evaluation.
    double scaled_coefficient(int region, int j) const;

    const ParticularSolution& particular(int region) const;

    BoundaryResiduals boundary_residuals() const;

    double dK() const { return dK_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    const CharRoots& roots() const { return roots_; }

private:
    double dK_;
    double fixed_cost_;
    double lower_;
    double upper_;
    CharRoots roots_;
    ParticularCoefficients particular_;
    double c11_ = 0.0;
    double c21_ = 0.0;
    double c22_ = 0.0;
    double c32_ = 0.0;
};

/// Stochastic model for a fixed airport: roots plus one PiecewiseValue per
/// admissible expansion size.
class StochasticModel {
public:
    StochasticModel(const CostParams& cost, const DemandParams& demand,
                    const CapacitySpec& capacity, const SearchOptions& options = {});

    const CharRoots& roots() const { return roots_; }
    std::span<const PiecewiseValue> branches() const { return branches_; }
    const PiecewiseValue& branch_for(double dK) const;

    const CostParams& cost() const { return cost_; }
    const DemandParams& demand() const { return demand_; }
    const CapacitySpec& capacity() const { return capacity_; }
    const SearchOptions& options() const { return options_; }

private:
    CostParams cost_;
    DemandParams demand_;
    CapacitySpec capacity_;
    SearchOptions options_;
    CharRoots roots_;
    std::vector<PiecewiseValue> branches_;
};

/// F(q, dK) for a single expansion size.
double stochastic_value(double q, double dK, double K0, const CostParams& cost,
                        const DemandParams& demand);

struct BestExpansion {
    double dK = 0.0;
    double value = 0.0;   ///< max over dK of F(q, dK)
};

/// Best expansion size at demand q; ties go to the smaller size.
BestExpansion best_expansion(double q, const StochasticModel& model);

struct ExpansionDecision {
    double q_star = 0.0;
    double dK_star = 0.0;
    double A1_bar = 0.0;                    ///< option coefficient, V(q) = A1_bar q^b1
    double value_at_trigger = 0.0;          ///< max_dK F(q*, dK)
    double smooth_pasting_residual = 0.0;   ///< (F'(q*) - V'(q*)) / |V'(q*)|
    bool interior = true;                   ///< false if q* sits on the search range edge
};

/// Trigger maximising max_dK F(q, dK) / q^b1. std::nullopt means no expansion
/// ever has positive value (never invest).
std::optional<ExpansionDecision> option_trigger(const StochasticModel& model);

std::optional<ExpansionDecision> option_trigger(const CostParams& cost,
                                                const DemandParams& demand,
                                                const CapacitySpec& capacity,
                                                const SearchOptions& options = {});

/// Same rule restricted to one expansion size.
std::optional<ExpansionDecision> option_trigger_for_size(double dK,
                                                         const StochasticModel& model);

/// V(q): A1_bar q^b1 while waiting, max_dK F(q, dK) once q >= q*.
double option_value(double q, const ExpansionDecision& decision, const StochasticModel& model);

}  // namespace runway
