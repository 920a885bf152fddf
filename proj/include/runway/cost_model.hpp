#pragma once

#include <cmath>
#include <vector>

namespace runway {

/// Monetary constants of the runway system. Defaults are the baseline airport.
struct CostParams {
    double c = 1000.0;      ///< $/operation, unit operating cost
    double c_h = 500.0;     ///< $/operation, unit capacity holding cost
    double A = 50000.0;     ///< $/operation, delay cost scale
    double alpha = 2.0;     ///< delay constant
    double beta = 3.0;      ///< delay exponent
    double mu = 1.0;        ///< kink of the modified delay function, as a fraction of capacity
    double f = 8e6;         ///< $, fixed capital cost of an expansion
    double v = 20.0;        ///< $*hour/operation, variable capital cost
    double N_p = 4000.0;    ///< operating hours per year
    double rho = 0.07;      ///< annual discount rate

    /// Throws ValidationError naming the first offending field.
    void validate() const;

    bool operator==(const CostParams&) const = default;
};

/// Initial capacity and the discrete set of admissible expansion sizes.
struct CapacitySpec {
    double K0 = 40.0;            ///< operations/hour
    double runway_unit = 40.0;   ///< operations/hour added per runway
    int max_runways_added = 5;

    void validate() const;

    double max_expansion() const { return runway_unit * max_runways_added; }

    /// {0, 1, ..., max_runways_added} * runway_unit.
    std::vector<double> expansion_grid() const;

    bool operator==(const CapacitySpec&) const = default;
};

/// Coefficients of the piecewise annual cost difference between the
/// current and the expanded system.
struct AlphaCoefficients {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double alpha4 = 0.0;
    double alpha5 = 0.0;
    double alpha6 = 0.0;
};

/// Which piece of the annual cost difference a demand level falls in.
enum class CostRegion {
    below_capacity,   ///< q < K0
    expanding,        ///< K0 <= q < K0 + dK
    above_expanded,   ///< q >= K0 + dK
};

/// Modified-Davidson delay cost in $/hour: the power-law delay below mu*K and
/// its tangent line above.
double delay_cost(double q, double capacity, const CostParams& p);

/// d(delay_cost)/dq.
double delay_cost_slope(double q, double capacity, const CostParams& p);

/// Operating + holding + delay cost in $/hour at capacity K.
double hourly_cost(double q, double capacity, const CostParams& p);

/// Lump-sum cost f + v*dK. The fixed part is paid even for dK == 0.
double investment_cost(double dK, const CostParams& p);

AlphaCoefficients alpha_coefficients(double dK, double K0, const CostParams& p);

/// Annual cost saving rate of the expanded system net of annualised investment.
double annual_cost_difference(double q, double dK, double K0, const CostParams& p);

/// Precomputed annual cost difference for one (dK, K0) pair. Evaluation is
/// allocation-free and usable from Monte Carlo inner loops.
class CostDifference {
public:
    CostDifference(double dK, double K0, const CostParams& p);

    double operator()(double q) const;

    /// Same value as operator()(exp(log_q)), with no exponentials in the top region.
    double at_log(double log_q) const
    {
        const auto& a = alphas_;
        if (log_q >= log_K1_)
            return a.alpha6;
        double q_pow = std::exp(power_ * log_q);
        if (log_q < log_K0_)
            return a.alpha1 * q_pow + a.alpha2;
        return a.alpha3 * q_pow + a.alpha4 * std::exp(log_q) + a.alpha5;
    }

    CostRegion region(double q) const;

    /// max over q >= 0 of |dC(q)|.
    double magnitude_bound() const;

    const AlphaCoefficients& alphas() const { return alphas_; }
    double lower_boundary() const { return K0_; }
    double upper_boundary() const { return K1_; }

private:
    AlphaCoefficients alphas_;
    double K0_;
    double K1_;
    double log_K0_;
    double log_K1_;
    double power_;   // beta + 1
};

}  // namespace runway
