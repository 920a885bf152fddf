#include "runway/stochastic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "runway/errors.hpp"

namespace runway {

double characteristic_phi(double b, const DemandParams& demand, double rho)
{
    const double half_var = 0.5 * demand.sigma * demand.sigma;
    double jump_term = demand.lambda == 0.0 ? 0.0 : demand.lambda * power_moment(demand.jump, b);
    return half_var * b * (b - 1.0) + demand.eta * b + jump_term - (rho + demand.lambda);
}

double characteristic_phi_slope(double b, const DemandParams& demand, double rho)
{
    (void)rho;
    double jump_term = 0.0;
    if (demand.lambda != 0.0) {
        for (const auto& atom : demand.jump.atoms()) {
            if (atom.size == 0.0)
                continue;
            double base = 1.0 + atom.size;
            jump_term += atom.probability * std::pow(base, b) * std::log(base);
        }
        jump_term *= demand.lambda;
    }
    return demand.sigma * demand.sigma * (b - 0.5) + demand.eta + jump_term;
}

namespace {

// Safeguarded Newton on a bracket with phi(negative_end) < 0 < phi(positive_end),
// run until the bracket collapses to a few ulps.
template <class Phi, class Slope>
double refine_root(Phi&& phi, Slope&& slope, double negative_end, double positive_end)
{
    double x = 0.5 * (negative_end + positive_end);
    double best = x;
    double best_residual = std::numeric_limits<double>::infinity();
    double width_before = std::abs(positive_end - negative_end) * 2.0;

    for (int iter = 0; iter < 2000; ++iter) {
        double fx = phi(x);
        if (std::abs(fx) < best_residual) {
            best_residual = std::abs(fx);
            best = x;
        }
        if (fx == 0.0)
            break;
        if (fx < 0.0)
            negative_end = x;
        else
            positive_end = x;

        double lo = std::min(negative_end, positive_end);
        double hi = std::max(negative_end, positive_end);
        double width = hi - lo;
        if (width <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            break;

        double next = x - fx / slope(x);
        bool newton_ok = std::isfinite(next) && next > lo && next < hi && width < 0.5 * width_before;
        width_before = width;
        if (!newton_ok)
            next = 0.5 * (lo + hi);
        if (next == x)
            break;
        x = next;
    }
    return best;
}

}  // namespace

CharRoots characteristic_roots(const DemandParams& demand, double rho, const RootOptions& options)
{
    auto phi = [&](double b) { return characteristic_phi(b, demand, rho); };
    auto slope = [&](double b) { return characteristic_phi_slope(b, demand, rho); };

    if (!(phi(1.0) < 0.0))
        throw RootSearchError("phi(1) >= 0: need rho > eta + lambda E[Z] for b1 > 1");

    // Grow brackets outward from 1 (for b1) and 0 (for b2) until phi turns positive.
    auto bracket = [&](double origin, double direction) {
        double inner = origin;
        double step = 1.0;
        while (step <= options.bracket_limit) {
            double outer = origin + direction * step;
            if (phi(outer) > 0.0)
                return std::pair{inner, outer};
            inner = outer;
            step *= 2.0;
        }
        throw RootSearchError("characteristic root not bracketed within |b| <= "
                              + std::to_string(options.bracket_limit));
    };

    auto [b1_neg, b1_pos] = bracket(1.0, +1.0);
    auto [b2_neg, b2_pos] = bracket(0.0, -1.0);

    CharRoots roots;
    roots.b1 = refine_root(phi, slope, b1_neg, b1_pos);
    roots.b2 = refine_root(phi, slope, b2_neg, b2_pos);
    roots.residual_b1 = phi(roots.b1);
    roots.residual_b2 = phi(roots.b2);
    return roots;
}

double ParticularSolution::value(double q) const
{
    double out = constant + linear * q;
    if (power != 0.0)
        out += power * std::pow(q, exponent);
    return out;
}

double ParticularSolution::slope(double q) const
{
    double out = linear;
    if (power != 0.0)
        out += power * exponent * std::pow(q, exponent - 1.0);
    return out;
}

ParticularCoefficients particular_coefficients(const AlphaCoefficients& alphas,
                                               const DemandParams& demand, double rho,
                                               double beta, double resonance_tolerance)
{
    const double sigma2 = demand.sigma * demand.sigma;
    const double power = beta + 1.0;
    const double jump_power =
        demand.lambda == 0.0 ? 0.0 : demand.lambda * power_moment(demand.jump, power);

    ParticularCoefficients out;
    out.power_denominator =
        sigma2 * beta * power / 2.0 + demand.eta * power + jump_power - (demand.lambda + rho);
    out.linear_denominator = demand.eta + demand.lambda * mean_jump(demand.jump) - rho;

    if (std::abs(out.power_denominator) < resonance_tolerance)
        throw ResonanceError("phi(beta+1) = " + std::to_string(out.power_denominator)
                             + " is too close to zero; parameters resonate with the q^(beta+1) "
                               "cost term");
    if (std::abs(out.linear_denominator) < resonance_tolerance)
        throw ResonanceError("phi(1) = " + std::to_string(out.linear_denominator)
                             + " is too close to zero");

    auto& r1 = out.region[0];
    r1.exponent = power;
    r1.power = -alphas.alpha1 / out.power_denominator;
    r1.constant = alphas.alpha2 / rho;

    auto& r2 = out.region[1];
    r2.exponent = power;
    r2.power = -alphas.alpha3 / out.power_denominator;
    r2.linear = -alphas.alpha4 / out.linear_denominator;
    r2.constant = alphas.alpha5 / rho;

    auto& r3 = out.region[2];
    r3.exponent = power;
    r3.constant = alphas.alpha6 / rho;
    return out;
}

double BoundaryResiduals::max() const
{
    return std::max({value_lower, slope_lower, value_upper, slope_upper});
}

PiecewiseValue::PiecewiseValue(double dK, double K0, const CostParams& cost,
                               const DemandParams& demand, const CharRoots& roots,
                               double resonance_tolerance)
    : dK_(dK), fixed_cost_(cost.f), roots_(roots)
{
    const CostDifference rate(dK, K0, cost);
    lower_ = rate.lower_boundary();
    upper_ = rate.upper_boundary();
    particular_ =
        particular_coefficients(rate.alphas(), demand, cost.rho, cost.beta, resonance_tolerance);
    if (dK == 0.0)
        return;

    const double b1 = roots.b1;
    const double b2 = roots.b2;
    const auto& p1 = particular_.region[0];
    const auto& p2 = particular_.region[1];
    const auto& p3 = particular_.region[2];

    const double gap_lower = p2.value(lower_) - p1.value(lower_);
    const double gap_lower_slope = p2.slope(lower_) - p1.slope(lower_);
    const double gap_upper = p3.value(upper_) - p2.value(upper_);
    const double gap_upper_slope = p3.slope(upper_) - p2.slope(upper_);

    c21_ = (b2 * gap_upper - upper_ * gap_upper_slope) / (b2 - b1);
    c22_ = (b1 * gap_lower - lower_ * gap_lower_slope) / (b2 - b1);
    c11_ = c21_ * std::pow(lower_ / upper_, b1) + c22_ + gap_lower;
    c32_ = c21_ + c22_ * std::pow(upper_ / lower_, b2) - gap_upper;
}

double PiecewiseValue::value_in(int region, double q) const
{
    const double b1 = roots_.b1;
    const double b2 = roots_.b2;
    const auto& p = particular(region);
    switch (region) {
    case 1:
        return c11_ * std::pow(q / lower_, b1) + p.value(q);
    case 2:
        return c21_ * std::pow(q / upper_, b1) + c22_ * std::pow(q / lower_, b2) + p.value(q);
    default:
        return c32_ * std::pow(q / upper_, b2) + p.value(q);
    }
}

double PiecewiseValue::slope_in(int region, double q) const
{
    const double b1 = roots_.b1;
    const double b2 = roots_.b2;
    const auto& p = particular(region);
    switch (region) {
    case 1:
        return c11_ * b1 * std::pow(q / lower_, b1) / q + p.slope(q);
    case 2:
        return (c21_ * b1 * std::pow(q / upper_, b1) + c22_ * b2 * std::pow(q / lower_, b2)) / q
               + p.slope(q);
    default:
        return c32_ * b2 * std::pow(q / upper_, b2) / q + p.slope(q);
    }
}

namespace {

int region_of(double q, double lower, double upper)
{
    if (q < lower)
        return 1;
    if (q < upper)
        return 2;
    return 3;
}

}  // namespace

double PiecewiseValue::value(double q) const
{
    if (!std::isfinite(q) || q <= 0.0)
        throw DomainError("demand must be finite and positive");
    if (dK_ == 0.0)
        return -fixed_cost_;
    return value_in(region_of(q, lower_, upper_), q);
}

double PiecewiseValue::slope(double q) const
{
    if (!std::isfinite(q) || q <= 0.0)
        throw DomainError("demand must be finite and positive");
    if (dK_ == 0.0)
        return 0.0;
    return slope_in(region_of(q, lower_, upper_), q);
}

double PiecewiseValue::scaled_coefficient(int region, int j) const
{
    if (region == 1 && j == 1)
        return c11_;
    if (region == 2 && j == 1)
        return c21_;
    if (region == 2 && j == 2)
        return c22_;
    if (region == 3 && j == 2)
        return c32_;
    if ((region == 1 && j == 2) || (region == 3 && j == 1))
        return 0.0;
    throw DomainError("coefficient index out of range");
}

double PiecewiseValue::coefficient(int region, int j) const
{
    double scaled = scaled_coefficient(region, j);
    if (scaled == 0.0)
        return 0.0;
    double anchor = (region == 1 || (region == 2 && j == 2)) ? lower_ : upper_;
    return scaled * std::pow(anchor, -(j == 1 ? roots_.b1 : roots_.b2));
}

const ParticularSolution& PiecewiseValue::particular(int region) const
{
    if (region < 1 || region > 3)
        throw DomainError("region index out of range");
    return particular_.region[static_cast<std::size_t>(region - 1)];
}

BoundaryResiduals PiecewiseValue::boundary_residuals() const
{
    BoundaryResiduals out;
    if (dK_ == 0.0)
        return out;
    auto relative = [](double left, double right, double scale) {
        scale = std::max({std::abs(left), std::abs(right), scale});
        return scale == 0.0 ? 0.0 : std::abs(left - right) / scale;
    };
    double v1 = value_in(1, lower_);
    double v2 = value_in(2, lower_);
    out.value_lower = relative(v1, v2, 0.0);
    out.slope_lower = relative(slope_in(1, lower_), slope_in(2, lower_),
                               std::max(std::abs(v1), std::abs(v2)) / lower_);
    double u2 = value_in(2, upper_);
    double u3 = value_in(3, upper_);
    out.value_upper = relative(u2, u3, 0.0);
    out.slope_upper = relative(slope_in(2, upper_), slope_in(3, upper_),
                               std::max(std::abs(u2), std::abs(u3)) / upper_);
    return out;
}

StochasticModel::StochasticModel(const CostParams& cost, const DemandParams& demand,
                                 const CapacitySpec& capacity, const SearchOptions& options)
    : cost_(cost), demand_(demand), capacity_(capacity), options_(options)
{
    cost_.validate();
    demand_.validate();
    capacity_.validate();
    if (!(cost_.rho > demand_.eta))
        throw ValidationError("rho", "discount rate must exceed the growth rate eta");
    roots_ = characteristic_roots(demand_, cost_.rho);
    for (double dK : capacity_.expansion_grid())
        branches_.emplace_back(dK, capacity_.K0, cost_, demand_, roots_,
                               options_.resonance_tolerance);
}

const PiecewiseValue& StochasticModel::branch_for(double dK) const
{
    for (const auto& branch : branches_)
        if (branch.dK() == dK)
            return branch;
    throw DomainError("expansion size " + std::to_string(dK) + " is not on the runway grid");
}

double stochastic_value(double q, double dK, double K0, const CostParams& cost,
                        const DemandParams& demand)
{
    if (dK == 0.0)
        return -cost.f;
    return PiecewiseValue(dK, K0, cost, demand, characteristic_roots(demand, cost.rho)).value(q);
}

BestExpansion best_expansion(double q, const StochasticModel& model)
{
    BestExpansion best;
    bool first = true;
    for (const auto& branch : model.branches()) {
        double value = branch.value(q);
        if (first || value > best.value) {
            best = {branch.dK(), value};
            first = false;
        }
    }
    return best;
}

namespace {

struct BranchOptimum {
    double q = 0.0;
    double ratio = -std::numeric_limits<double>::infinity();
    bool interior = true;
};

// Maximises F(q)/q^b1 for one branch: grid scan, then golden section in the
// cells either side of the best grid point.
BranchOptimum maximise_ratio(const PiecewiseValue& branch, std::span<const double> grid,
                             double b1, double tolerance)
{
    auto ratio = [&](double q) { return branch.value(q) * std::exp(-b1 * std::log(q)); };
    std::size_t best = 0;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double r = ratio(grid[i]);
        if (r > best_ratio) {
            best_ratio = r;
            best = i;
        }
    }
    double lo = grid[best == 0 ? 0 : best - 1];
    double hi = grid[std::min(best + 1, grid.size() - 1)];
    double q = golden_section_max(ratio, lo, hi, tolerance);
    BranchOptimum out{q, ratio(q), true};
    if (best_ratio > out.ratio) {
        out.q = grid[best];
        out.ratio = best_ratio;
    }
    out.interior = best != 0 && best != grid.size() - 1;
    return out;
}

ExpansionDecision finish_decision(const BranchOptimum& optimum, const PiecewiseValue& branch,
                                  double value_at_trigger, double dK_star, double b1)
{
    ExpansionDecision d;
    d.q_star = optimum.q;
    d.dK_star = dK_star;
    d.value_at_trigger = value_at_trigger;
    d.A1_bar = value_at_trigger * std::exp(-b1 * std::log(optimum.q));
    d.interior = optimum.interior;
    double v_slope = d.A1_bar * b1 * std::pow(optimum.q, b1 - 1.0);
    d.smooth_pasting_residual = (branch.slope(optimum.q) - v_slope) / std::abs(v_slope);
    return d;
}

std::vector<double> trigger_grid(const StochasticModel& model)
{
    const auto& cap = model.capacity();
    const auto& opt = model.options();
    return log_grid(opt.q_min, 2.0 * (cap.K0 + cap.max_expansion()), opt.option_grid_points);
}

}  // namespace

std::optional<ExpansionDecision> option_trigger(const StochasticModel& model)
{
    const auto grid = trigger_grid(model);
    const double b1 = model.roots().b1;

    const PiecewiseValue* best_branch = nullptr;
    BranchOptimum best;
    for (const auto& branch : model.branches()) {
        if (branch.dK() == 0.0)
            continue;  // ratio is -f/q^b1 < 0 everywhere
        auto optimum = maximise_ratio(branch, grid, b1, model.options().option_tolerance);
        if (optimum.ratio > best.ratio) {
            best = optimum;
            best_branch = &branch;
        }
    }
    if (best_branch == nullptr || !(best.ratio > 0.0))
        return std::nullopt;

    auto envelope = best_expansion(best.q, model);
    const PiecewiseValue& active = model.branch_for(envelope.dK);
    return finish_decision(best, active, envelope.value, envelope.dK, b1);
}

std::optional<ExpansionDecision> option_trigger(const CostParams& cost,
                                                const DemandParams& demand,
                                                const CapacitySpec& capacity,
                                                const SearchOptions& options)
{
    return option_trigger(StochasticModel(cost, demand, capacity, options));
}

std::optional<ExpansionDecision> option_trigger_for_size(double dK, const StochasticModel& model)
{
    const auto& branch = model.branch_for(dK);
    if (dK == 0.0)
        return std::nullopt;
    const auto grid = trigger_grid(model);
    const double b1 = model.roots().b1;
    auto optimum = maximise_ratio(branch, grid, b1, model.options().option_tolerance);
    if (!(optimum.ratio > 0.0))
        return std::nullopt;
    return finish_decision(optimum, branch, branch.value(optimum.q), dK, b1);
}

double option_value(double q, const ExpansionDecision& decision, const StochasticModel& model)
{
    if (!std::isfinite(q) || q <= 0.0)
        throw DomainError("demand must be finite and positive");
    if (q < decision.q_star)
        return decision.A1_bar * std::pow(q, model.roots().b1);
    return best_expansion(q, model).value;
}

}  // namespace runway
