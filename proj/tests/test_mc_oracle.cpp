#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

#include "runway/deterministic_solver.hpp"
#include "runway/errors.hpp"
#include "runway/mc_oracle.hpp"
#include "runway/stochastic_solver.hpp"

using namespace runway;

namespace {

SimConfig quick(std::uint64_t paths)
{
    SimConfig cfg;
    cfg.dt = 0.02;
    cfg.horizon = 100.0;
    cfg.n_paths = paths;
    cfg.seed = 5;
    return cfg;
}

}  // namespace

TEST_CASE("simulation config validation")
{
    SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.steps() == 50'000);
    cfg.dt = 0.2;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SimConfig{};
    cfg.horizon = 50.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SimConfig{};
    cfg.n_paths = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("paths without noise follow exponential growth exactly")
{
    DemandParams d;
    d.sigma = 0.0;
    d.lambda = 0.0;
    SimConfig cfg = quick(1);
    auto path = simulate_path(d, 10.0, cfg, 3);
    REQUIRE(path.demand.size() == cfg.steps() + 1);
    CHECK(path.jump_count == 0);
    for (std::size_t i = 0; i < path.demand.size(); ++i)
        CHECK(path.demand[i] == 10.0 * std::exp(d.eta * (static_cast<double>(i) * cfg.dt)));
}

TEST_CASE("paths are keyed by seed and index")
{
    DemandParams d;
    SimConfig cfg = quick(1);
    auto a = simulate_path(d, 10.0, cfg, 7);
    auto b = simulate_path(d, 10.0, cfg, 7);
    auto c = simulate_path(d, 10.0, cfg, 8);
    CHECK(a.demand == b.demand);
    CHECK(a.demand != c.demand);
    cfg.seed += 1;
    CHECK(simulate_path(d, 10.0, cfg, 7).demand != a.demand);
    CHECK_THROWS_AS(simulate_path(d, 0.0, cfg, 0), DomainError);
}

TEST_CASE("terminal mean and jump counts match the jump-diffusion")
{
    DemandParams d;
    d.jump = JumpSpec::discrete({{-0.1, 0.5}, {-0.3, 0.5}});
    SimConfig cfg = quick(1);
    const std::uint64_t n = 100'000;
    const std::size_t mark = 500;   // t = 10 years
    const double t = static_cast<double>(mark) * cfg.dt;

    std::vector<double> terminal(n);
    std::vector<std::uint64_t> counts(n);
    for (std::uint64_t p = 0; p < n; ++p) {
        auto path = simulate_path(d, 10.0, cfg, p);
        terminal[p] = path.demand[mark];
        counts[p] = path.jump_count;
    }

    const double mean = std::accumulate(terminal.begin(), terminal.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : terminal)
        ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (n - 1) / n);
    const double expected = 10.0 * std::exp((d.eta + d.lambda * mean_jump(d.jump)) * t);
    CHECK(std::abs(mean - expected) <= 3.0 * se);

    // chi-square against Poisson(lambda * horizon), tail bins pooled
    const double mu = d.lambda * cfg.horizon;
    const int bins = 12;
    std::vector<double> observed(bins, 0.0);
    for (auto k : counts)
        observed[std::min<std::uint64_t>(k, bins - 1)] += 1.0;
    double stat = 0.0;
    double cumulative = 0.0;
    for (int k = 0; k < bins; ++k) {
        double prob = k < bins - 1 ? std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0))
                                   : 1.0 - cumulative;
        cumulative += prob;
        const double e = prob * n;
        stat += (observed[k] - e) * (observed[k] - e) / e;
    }
    boost::math::chi_squared chi2(bins - 1);
    CHECK(stat < boost::math::quantile(chi2, 0.99));
}

TEST_CASE("no expansion gives the discounted fixed cost")
{
    CostParams p;
    DemandParams d;
    SimConfig cfg = quick(50);
    auto est = mc_value(10.0, 0.0, p, d, CapacitySpec{}, cfg);
    const double exact = -p.f * (1.0 - std::exp(-p.rho * cfg.horizon));
    CHECK(est.mean == doctest::Approx(exact).epsilon(1e-6));
    CHECK(est.std_error <= 1e-9 * std::abs(exact));
    CHECK(est.n_paths == 50);
}

TEST_CASE("without noise the estimate reproduces the deterministic value")
{
    CostParams p;
    DemandParams d;
    d.sigma = 0.0;
    d.lambda = 0.0;
    SimConfig cfg;
    cfg.dt = 1.0 / 250.0;
    cfg.horizon = 200.0;
    cfg.n_paths = 2;
    auto est = mc_value(10.0, 40.0, p, d, CapacitySpec{}, cfg);
    CHECK(est.mean == doctest::Approx(det_value(10.0, 40.0, 40.0, p, d.eta)).epsilon(1e-3));
    CHECK(est.std_error == 0.0);
}

TEST_CASE("a single path has an undefined standard error")
{
    auto est = mc_value(10.0, 40.0, CostParams{}, DemandParams{}, CapacitySpec{}, quick(1));
    CHECK(std::isinf(est.std_error));
}

TEST_CASE("truncation bound")
{
    CostParams p;
    SimConfig cfg = quick(2);
    auto est = mc_value(10.0, 40.0, p, DemandParams{}, CapacitySpec{}, cfg);
    CostDifference dc(40.0, 40.0, p);
    CHECK(est.truncation_bound
          == doctest::Approx(dc.magnitude_bound() * std::exp(-p.rho * cfg.horizon) / p.rho));
}

TEST_CASE("estimates do not depend on the worker count")
{
    SimConfig cfg = quick(300);
    const PanelPoint panel[] = {{5, 40}, {10, 40}, {50, 80}};
    auto one = mc_values(panel, CostParams{}, DemandParams{}, CapacitySpec{}, cfg, 1);
    auto four = mc_values(panel, CostParams{}, DemandParams{}, CapacitySpec{}, cfg, 4);
    REQUIRE(one.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(one[j].mean == four[j].mean);
        CHECK(one[j].std_error == four[j].std_error);
        // batching points together changes nothing either
        auto alone = mc_value(panel[j].q, panel[j].dK, CostParams{}, DemandParams{},
                              CapacitySpec{}, cfg, 3);
        CHECK(alone.mean == one[j].mean);
        CHECK(alone.std_error == one[j].std_error);
    }
}

TEST_CASE("standard error shrinks like one over root n")
{
    auto small = mc_value(10.0, 40.0, CostParams{}, DemandParams{}, CapacitySpec{}, quick(4000));
    auto large = mc_value(10.0, 40.0, CostParams{}, DemandParams{}, CapacitySpec{}, quick(8000));
    CHECK(small.std_error / large.std_error == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
}

TEST_CASE("estimate brackets the closed form at reduced scale")
{
    CostParams p;
    DemandParams d;
    SimConfig cfg;
    cfg.n_paths = 4000;
    auto est = mc_value(10.0, 40.0, p, d, CapacitySpec{}, cfg);
    const double closed = stochastic_value(10.0, 40.0, 40.0, p, d);
    CHECK(std::abs(closed - est.mean) <= 3.0 * est.std_error + est.truncation_bound);
}

TEST_CASE("pairwise sum")
{
    std::vector<double> ones(1000, 1.0);
    CHECK(pairwise_sum(ones) == 1000.0);
    CHECK(pairwise_sum({}) == 0.0);
    std::vector<double> tiny(1 << 20, 0.1);
    const double naive = std::accumulate(tiny.begin(), tiny.end(), 0.0);
    const double exact = 0.1 * (1 << 20);
    CHECK(std::abs(pairwise_sum(tiny) - exact) < std::abs(naive - exact));
}

TEST_CASE("scoring")
{
    McEstimate est;
    est.mean = 100.0;
    est.std_error = 1.0;
    est.truncation_bound = 0.5;
    CHECK(score_against_estimate({1, 40}, 102.0, est).z == doctest::Approx(1.5));
    CHECK(score_against_estimate({1, 40}, 96.0, est).z == doctest::Approx(-3.5));
    CHECK_FALSE(score_against_estimate({1, 40}, 96.0, est).pass);
    CHECK(score_against_estimate({1, 40}, 100.3, est).z == 0.0);
    CHECK(score_against_estimate({1, 40}, 103.5, est).pass);
}

TEST_CASE("oracle comparison")
{
    CHECK(oracle_compare({}, CostParams{}, DemandParams{}, CapacitySpec{}, quick(10)).rows.empty());

    const PanelPoint panel[] = {{10, 40}};
    auto report = oracle_compare(panel, CostParams{}, DemandParams{}, CapacitySpec{}, quick(500));
    REQUIRE(report.rows.size() == 1);
    CHECK(report.all_pass());

    // a closed form that is badly off is caught
    auto wrong = oracle_compare(panel, CostParams{}, DemandParams{}, CapacitySpec{}, quick(500), 0,
                                [](double q, double dK) {
                                    return 2.0 * stochastic_value(q, dK, 40.0, CostParams{},
                                                                  DemandParams{});
                                });
    CHECK_FALSE(wrong.all_pass());

    std::ostringstream csv;
    write_oracle_csv(csv, report);
    CHECK(csv.str().rfind("q,dK,closed_form,mc_mean,std_error,truncation_bound,z,pass\n", 0) == 0);
}
