#include "runway/cost_model.hpp"

#include <algorithm>
#include <cmath>

#include "runway/errors.hpp"

namespace runway {

namespace {

void require_positive(double value, const char* key)
{
    if (!(std::isfinite(value) && value > 0.0))
        throw ValidationError(key, "must be finite and strictly positive");
}

void check_demand_and_capacity(double q, double capacity)
{
    if (!std::isfinite(q) || q < 0.0)
        throw DomainError("demand must be finite and non-negative");
    if (!std::isfinite(capacity) || capacity <= 0.0)
        throw DomainError("capacity must be finite and positive");
}

}  // namespace

void CostParams::validate() const
{
    require_positive(c, "c");
    require_positive(c_h, "c_h");
    require_positive(A, "A");
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    if (beta < 1.0)
        throw ValidationError("beta", "must be >= 1 for a convex delay function");
    require_positive(mu, "mu");
    require_positive(f, "f");
    require_positive(v, "v");
    require_positive(N_p, "N_p");
    require_positive(rho, "rho");
}

void CapacitySpec::validate() const
{
    require_positive(runway_unit, "runway_unit");
    require_positive(K0, "K0");
    double runways = K0 / runway_unit;
    if (std::abs(runways - std::round(runways)) > 1e-9 * std::max(1.0, runways))
        throw ValidationError("K0", "must be a positive multiple of runway_unit");
    if (max_runways_added < 1)
        throw ValidationError("max_runways_added", "must be at least 1");
}

std::vector<double> CapacitySpec::expansion_grid() const
{
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(max_runways_added) + 1);
    for (int k = 0; k <= max_runways_added; ++k)
        grid.push_back(runway_unit * k);
    return grid;
}

double delay_cost(double q, double capacity, const CostParams& p)
{
    check_demand_and_capacity(q, capacity);
    double kink = p.mu * capacity;
    if (q <= kink)
        return p.A * q * (1.0 + p.alpha * std::pow(q / capacity, p.beta));
    double mu_pow = std::pow(p.mu, p.beta);
    return p.A * (1.0 + p.alpha * (p.beta + 1.0) * mu_pow) * q
           - p.A * p.alpha * p.beta * mu_pow * p.mu * capacity;
}

double delay_cost_slope(double q, double capacity, const CostParams& p)
{
    check_demand_and_capacity(q, capacity);
    double utilisation = std::min(q / capacity, p.mu);
    return p.A * (1.0 + p.alpha * (p.beta + 1.0) * std::pow(utilisation, p.beta));
}

double hourly_cost(double q, double capacity, const CostParams& p)
{
    return p.c * q + p.c_h * capacity + delay_cost(q, capacity, p);
}

double investment_cost(double dK, const CostParams& p)
{
    if (!std::isfinite(dK) || dK < 0.0)
        throw DomainError("expansion size must be finite and non-negative");
    return p.f + p.v * dK;
}

// With mu != 1 the pieces sit at mu*K0 and mu*(K0+dK); at mu == 1 these are
// the textbook coefficients.
AlphaCoefficients alpha_coefficients(double dK, double K0, const CostParams& p)
{
    if (!std::isfinite(dK) || dK < 0.0)
        throw DomainError("expansion size must be finite and non-negative");
    if (!std::isfinite(K0) || K0 <= 0.0)
        throw DomainError("initial capacity must be finite and positive");

    const double K1 = K0 + dK;
    const double scale = p.N_p * p.A * p.alpha;
    const double mu_pow = std::pow(p.mu, p.beta);

    AlphaCoefficients a;
    a.alpha1 = dK == 0.0 ? 0.0 : scale * (std::pow(K0, -p.beta) - std::pow(K1, -p.beta));
    a.alpha2 = -(p.N_p * p.c_h + p.rho * p.v) * dK - p.rho * p.f;
    a.alpha3 = -scale * std::pow(K1, -p.beta);
    a.alpha4 = scale * (p.beta + 1.0) * mu_pow;
    a.alpha5 = a.alpha2 - scale * p.beta * mu_pow * p.mu * K0;
    a.alpha6 = -(p.N_p * (p.c_h - p.A * p.alpha * p.beta * mu_pow * p.mu) + p.rho * p.v) * dK
               - p.rho * p.f;
    return a;
}

double annual_cost_difference(double q, double dK, double K0, const CostParams& p)
{
    if (!std::isfinite(q) || q < 0.0)
        throw DomainError("demand must be finite and non-negative");
    return CostDifference(dK, K0, p)(q);
}

CostDifference::CostDifference(double dK, double K0, const CostParams& p)
    : alphas_(alpha_coefficients(dK, K0, p)),
      K0_(p.mu * K0),
      K1_(p.mu * (K0 + dK)),
      log_K0_(std::log(K0_)),
      log_K1_(std::log(K1_)),
      power_(p.beta + 1.0)
{
}

CostRegion CostDifference::region(double q) const
{
    if (q < K0_)
        return CostRegion::below_capacity;
    if (q < K1_)
        return CostRegion::expanding;
    return CostRegion::above_expanded;
}

double CostDifference::operator()(double q) const
{
    const auto& a = alphas_;
    if (q >= K1_)
        return a.alpha6;
    double q_pow = std::pow(q, power_);
    if (q < K0_)
        return a.alpha1 * q_pow + a.alpha2;
    return a.alpha3 * q_pow + a.alpha4 * q + a.alpha5;
}

double CostDifference::magnitude_bound() const
{
    const auto& a = alphas_;
    double bound = std::max({std::abs(a.alpha2), std::abs(a.alpha6),
                             std::abs(a.alpha1 * std::pow(K0_, power_) + a.alpha2)});
    if (K1_ > K0_) {
        auto middle = [&](double q) {
            return std::abs(a.alpha3 * std::pow(q, power_) + a.alpha4 * q + a.alpha5);
        };
        bound = std::max({bound, middle(K0_), middle(K1_)});
        // Stationary point of the middle piece, where it has one.
        double critical = std::pow(a.alpha4 / (-a.alpha3 * power_), 1.0 / (power_ - 1.0));
        if (critical > K0_ && critical < K1_)
            bound = std::max(bound, middle(critical));
    }
    return bound;
}

}  // namespace runway
