#include "runway/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/random/geometric_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <random>

#include "runway/csv.hpp"
#include "runway/deterministic_solver.hpp"
#include "runway/errors.hpp"
#include "runway/parallel.hpp"
#include "runway/stochastic_solver.hpp"

namespace runway {

void SimConfig::validate() const
{
    if (!(std::isfinite(dt) && dt > 0.0 && dt <= 0.1))
        throw ValidationError("mc.dt", "must lie in (0, 0.1]");
    if (!(std::isfinite(horizon) && horizon >= 100.0))
        throw ValidationError("mc.horizon", "must be at least 100 years");
    if (n_paths < 1)
        throw ValidationError("mc.paths", "must be at least 1");
}

std::uint64_t SimConfig::steps() const
{
    return static_cast<std::uint64_t>(std::llround(horizon / dt));
}

namespace {

// Log-space stepper for one path. Demand at step i is
// q0 * exp((eta - sigma^2/2) t_i + sigma sqrt(dt) W_i + J_i), where W_i is the
// running sum of standard normals and J_i the running sum of log(1+Z) over jumps.
// Jump arrivals are Bernoulli(lambda dt) per step, drawn as geometric gaps.
class PathStepper {
public:
    PathStepper(const DemandParams& demand, const SimConfig& cfg, std::uint64_t path_index)
        : jump_(demand.jump),
          drift_(demand.eta - 0.5 * demand.sigma * demand.sigma),
          vol_step_(demand.sigma * std::sqrt(cfg.dt)),
          dt_(cfg.dt),
          diffuses_(demand.sigma != 0.0)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                          static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(path_index),
                          static_cast<std::uint32_t>(path_index >> 32)};
        engine_.seed(seq);

        bool any_jump = false;
        for (const auto& atom : jump_.atoms())
            any_jump = any_jump || atom.size != 0.0;
        double jump_probability = demand.lambda * cfg.dt;
        if (jump_probability > 1.0)
            throw ValidationError("mc.dt", "lambda * dt must not exceed 1");
        jumps_ = any_jump && jump_probability > 0.0;
        if (jumps_) {
            gap_ = boost::random::geometric_distribution<std::uint64_t, double>(jump_probability);
            constant_log_jump_ = std::log1p(jump_.atoms().front().size);
            next_jump_ = 1 + gap_(engine_);
        }
    }

    /// Exponent at the next grid point; step numbers start at 1.
    double advance()
    {
        ++step_;
        if (diffuses_)
            brownian_ += normal_(engine_);
        if (jumps_ && step_ == next_jump_) {
            log_jumps_ += jump_.is_constant() ? constant_log_jump_
                                              : std::log1p(jump_.size_for(uniform_(engine_)));
            ++jump_count_;
            next_jump_ = step_ + 1 + gap_(engine_);
        }
        double t = static_cast<double>(step_) * dt_;
        return drift_ * t + vol_step_ * brownian_ + log_jumps_;
    }

    std::uint64_t jump_count() const { return jump_count_; }

private:
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
    boost::random::uniform_01<double> uniform_;
    boost::random::geometric_distribution<std::uint64_t, double> gap_;
    const JumpSpec& jump_;
    double drift_;
    double vol_step_;
    double dt_;
    bool diffuses_;
    bool jumps_ = false;
    double constant_log_jump_ = 0.0;
    double brownian_ = 0.0;
    double log_jumps_ = 0.0;
    std::uint64_t step_ = 0;
    std::uint64_t next_jump_ = 0;
    std::uint64_t jump_count_ = 0;
};

void check_start(double q0)
{
    if (!(std::isfinite(q0) && q0 > 0.0))
        throw DomainError("initial demand must be finite and positive");
}

}  // namespace

DemandPath simulate_path(const DemandParams& demand, double q0, const SimConfig& cfg,
                         std::uint64_t path_index)
{
    check_start(q0);
    cfg.validate();
    const std::uint64_t steps = cfg.steps();
    PathStepper stepper(demand, cfg, path_index);
    DemandPath path;
    path.demand.reserve(steps + 1);
    path.demand.push_back(q0);
    for (std::uint64_t i = 1; i <= steps; ++i)
        path.demand.push_back(q0 * std::exp(stepper.advance()));
    path.jump_count = stepper.jump_count();
    return path;
}

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 64) {
        double total = 0.0;
        for (double v : values)
            total += v;
        return total;
    }
    std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

// Annual saving rate of one panel point as a function of the path exponent x,
// where demand is q0 e^x. The powers of q0 are folded into the coefficients so
// that all points share the exponentials e^x and e^{(beta+1)x}.
class ScaledRate {
public:
    ScaledRate(const CostDifference& rate, double q0, double power)
        : a_(rate.alphas()),
          lower_(std::log(rate.lower_boundary() / q0)),
          upper_(std::log(rate.upper_boundary() / q0))
    {
        const double q0_pow = std::pow(q0, power);
        a_.alpha1 *= q0_pow;
        a_.alpha3 *= q0_pow;
        a_.alpha4 *= q0;
    }

    /// Above this exponent the rate is the constant saturated().
    double upper() const { return upper_; }
    double saturated() const { return a_.alpha6; }

    /// Rate for x below upper().
    double below(double x, double exp_x, double exp_px) const
    {
        if (x < lower_)
            return a_.alpha1 * exp_px + a_.alpha2;
        return a_.alpha3 * exp_px + a_.alpha4 * exp_x + a_.alpha5;
    }

private:
    AlphaCoefficients a_;
    double lower_;
    double upper_;
};

McEstimate summarize(std::span<const double> per_path, double truncation_bound)
{
    McEstimate out;
    out.n_paths = per_path.size();
    const double n = static_cast<double>(per_path.size());
    out.mean = pairwise_sum(per_path) / n;
    if (per_path.size() > 1) {
        std::vector<double> squares(per_path.size());
        for (std::size_t i = 0; i < per_path.size(); ++i)
            squares[i] = (per_path[i] - out.mean) * (per_path[i] - out.mean);
        const double variance = pairwise_sum(squares) / (n - 1.0);
        out.std_error = std::sqrt(variance / n);
    } else {
        out.std_error = std::numeric_limits<double>::infinity();
    }
    out.truncation_bound = truncation_bound;
    return out;
}

}  // namespace

std::vector<McEstimate> mc_values(std::span<const PanelPoint> points, const CostParams& cost,
                                  const DemandParams& demand, const CapacitySpec& capacity,
                                  const SimConfig& cfg, unsigned workers)
{
    cfg.validate();
    if (points.empty())
        return {};
    const std::uint64_t steps = cfg.steps();
    const std::size_t n_points = points.size();

    const double power = cost.beta + 1.0;
    // small integer powers of e^x are cheaper by multiplication
    const int int_power = power == std::floor(power) && power <= 8.0 ? static_cast<int>(power) : 0;
    std::vector<CostDifference> rates;
    std::vector<ScaledRate> scaled;
    for (const auto& point : points) {
        check_start(point.q);
        rates.emplace_back(point.dK, capacity.K0, cost);
        scaled.emplace_back(rates.back(), point.q, power);
    }

    double highest_upper = -std::numeric_limits<double>::infinity();
    for (const auto& rate : scaled)
        highest_upper = std::max(highest_upper, rate.upper());

    std::vector<double> discount(steps + 1);
    for (std::uint64_t i = 0; i <= steps; ++i)
        discount[i] = std::exp(-cost.rho * static_cast<double>(i) * cfg.dt);
    discount.back() *= 0.5;   // trapezoid end weight

    // per_path[j * n_paths + p]: path p's discounted saving for point j
    std::vector<double> per_path(n_points * cfg.n_paths);
    parallel_for(
        cfg.n_paths, workers,
        [&](std::size_t path) {
            PathStepper stepper(demand, cfg, path);
            // Discount weight spent in the saturated region is summed separately
            // and multiplied by the constant rate at the end.
            std::vector<double> total(n_points, 0.0);
            std::vector<double> saturated_weight(n_points, 0.0);
            for (std::size_t j = 0; j < n_points; ++j) {
                if (0.0 >= scaled[j].upper())
                    saturated_weight[j] += 0.5;
                else
                    total[j] += 0.5 * scaled[j].below(0.0, 1.0, 1.0);
            }
            for (std::uint64_t i = 1; i <= steps; ++i) {
                const double x = stepper.advance();
                const double weight = discount[i];
                if (x >= highest_upper) {
                    for (std::size_t j = 0; j < n_points; ++j)
                        saturated_weight[j] += weight;
                    continue;
                }
                const double exp_x = std::exp(x);
                double exp_px;
                if (int_power > 0) {
                    exp_px = exp_x;
                    for (int k = 1; k < int_power; ++k)
                        exp_px *= exp_x;
                } else {
                    exp_px = std::exp(power * x);
                }
                for (std::size_t j = 0; j < n_points; ++j) {
                    if (x >= scaled[j].upper())
                        saturated_weight[j] += weight;
                    else
                        total[j] += scaled[j].below(x, exp_x, exp_px) * weight;
                }
            }
            for (std::size_t j = 0; j < n_points; ++j)
                per_path[j * cfg.n_paths + path] =
                    (total[j] + scaled[j].saturated() * saturated_weight[j]) * cfg.dt;
        },
        64);

    const double tail = std::exp(-cost.rho * static_cast<double>(steps) * cfg.dt) / cost.rho;
    std::vector<McEstimate> out;
    for (std::size_t j = 0; j < n_points; ++j)
        out.push_back(summarize(std::span(per_path).subspan(j * cfg.n_paths, cfg.n_paths),
                                rates[j].magnitude_bound() * tail));
    return out;
}

McEstimate mc_value(double q, double dK, const CostParams& cost, const DemandParams& demand,
                    const CapacitySpec& capacity, const SimConfig& cfg, unsigned workers)
{
    const PanelPoint point{q, dK};
    return mc_values(std::span(&point, 1), cost, demand, capacity, cfg, workers).front();
}

bool OracleReport::all_pass() const
{
    for (const auto& row : rows)
        if (!row.pass)
            return false;
    return true;
}

OracleRow score_against_estimate(PanelPoint point, double closed_form, const McEstimate& estimate,
                                 double z_limit)
{
    OracleRow row;
    row.point = point;
    row.closed_form = closed_form;
    row.estimate = estimate;
    double gap = closed_form - estimate.mean;
    double excess = std::max(0.0, std::abs(gap) - estimate.truncation_bound);
    if (excess == 0.0)
        row.z = 0.0;
    else
        row.z = std::copysign(excess / estimate.std_error, gap);
    row.pass = std::abs(row.z) <= z_limit;
    return row;
}

ClosedForm default_closed_form(const CostParams& cost, const DemandParams& demand,
                               const CapacitySpec& capacity)
{
    if (demand.sigma == 0.0 && demand.lambda == 0.0) {
        return [cost, eta = demand.eta, K0 = capacity.K0](double q, double dK) {
            return det_value(q, dK, K0, cost, eta);
        };
    }
    auto roots = characteristic_roots(demand, cost.rho);
    return [cost, demand, roots, K0 = capacity.K0](double q, double dK) {
        if (dK == 0.0)
            return -cost.f;
        return PiecewiseValue(dK, K0, cost, demand, roots).value(q);
    };
}

OracleReport oracle_compare(std::span<const PanelPoint> panel, const CostParams& cost,
                            const DemandParams& demand, const CapacitySpec& capacity,
                            const SimConfig& cfg, unsigned workers, const ClosedForm& closed_form)
{
    OracleReport report;
    if (panel.empty())
        return report;
    ClosedForm closed = closed_form ? closed_form : default_closed_form(cost, demand, capacity);
    auto estimates = mc_values(panel, cost, demand, capacity, cfg, workers);
    for (std::size_t j = 0; j < panel.size(); ++j) {
        const auto& point = panel[j];
        report.rows.push_back(score_against_estimate(point, closed(point.q, point.dK), estimates[j]));
    }
    return report;
}

void write_oracle_csv(std::ostream& out, const OracleReport& report)
{
    CsvTable table;
    table.header = {"q", "dK", "closed_form", "mc_mean", "std_error", "truncation_bound", "z",
                    "pass"};
    for (const auto& row : report.rows) {
        table.rows.push_back({format_number(row.point.q), format_number(row.point.dK),
                              format_number(row.closed_form), format_number(row.estimate.mean),
                              format_number(row.estimate.std_error),
                              format_number(row.estimate.truncation_bound), format_number(row.z),
                              row.pass ? "true" : "false"});
    }
    table.write(out);
}

}  // namespace runway
