#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "runway/deterministic_solver.hpp"
#include "runway/errors.hpp"

using namespace runway;

TEST_CASE("coefficients for no expansion")
{
    CostParams p;
    auto k = det_value_coefficients(0.0, 40.0, p, 0.02);
    CHECK(k.A1 == 0.0);
    CHECK(k.A2() == 0.0);
    CHECK(k.A3 == -8e6);
    for (double q : {0.5, 10.0, 40.0, 100.0, 1000.0})
        CHECK(det_value(q, 0.0, 40.0, p, 0.02) == -8e6);
}

TEST_CASE("coefficients at the baseline")
{
    CostParams p;
    auto k = det_value_coefficients(40.0, 40.0, p, 0.02);
    CHECK(k.A1 == doctest::Approx(-546'875.0).epsilon(1e-12));
    CHECK(k.A3 == doctest::Approx(-(4000.0 * 500.0 + 0.07 * 20.0) * 40.0 / 0.07 - 8e6)
                      .epsilon(1e-14));
    CHECK(k.A3 == doctest::Approx(-1.1509e9).epsilon(1e-4));
}

TEST_CASE("closed form matches quadrature at the reference point")
{
    CostParams p;
    const double closed = det_value(10.0, 40.0, 40.0, p, 0.02);
    const double numeric = oracle::det_value_quadrature(10.0, 40.0, 40.0, p, 0.02);
    CHECK(closed == doctest::Approx(numeric).epsilon(1e-6));
}

TEST_CASE("closed form matches quadrature for random parameters")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        CostParams p;
        p.A = 1e4 + 1e5 * u(rng);
        p.alpha = 0.5 + 3.0 * u(rng);
        p.beta = 1.0 + 3.0 * u(rng);
        p.mu = 0.6 + 0.8 * u(rng);
        p.c_h = 100.0 + 900.0 * u(rng);
        p.rho = 0.04 + 0.08 * u(rng);
        const double eta = 0.005 + (p.rho - 0.01) * u(rng);
        const double K0 = 40.0 * (1 + static_cast<int>(3 * u(rng)));
        const double dK = 40.0 * (1 + static_cast<int>(4 * u(rng)));
        const double q = 0.5 + 2.0 * (K0 + dK) * u(rng);
        double closed = 0.0;
        try {
            closed = det_value(q, dK, K0, p, eta);
        } catch (const SingularParameterError&) {
            continue;
        }
        const double numeric = oracle::det_value_quadrature(q, dK, K0, p, eta);
        INFO("q=", q, " dK=", dK, " K0=", K0, " eta=", eta, " rho=", p.rho, " beta=", p.beta);
        CHECK(closed == doctest::Approx(numeric).epsilon(1e-6));
    }
}

TEST_CASE("value is constant above the expanded capacity")
{
    CostParams p;
    auto a = alpha_coefficients(40.0, 40.0, p);
    CHECK(det_value(80.0, 40.0, 40.0, p, 0.02) == doctest::Approx(a.alpha6 / p.rho));
    CHECK(det_value(500.0, 40.0, 40.0, p, 0.02) == doctest::Approx(a.alpha6 / p.rho));
}

TEST_CASE("singular parameter combinations are rejected")
{
    CostParams p;
    CHECK_THROWS_AS(det_value_coefficients(40.0, 40.0, p, 0.0175), SingularParameterError);
    CHECK_THROWS_AS(det_value_coefficients(40.0, 40.0, p, 0.07), SingularParameterError);
    CHECK_THROWS_AS(det_value_coefficients(40.0, 40.0, p, 0.0175 + 1e-11), SingularParameterError);
    CHECK_NOTHROW(det_value_coefficients(40.0, 40.0, p, 0.0175 + 1e-6));
}

TEST_CASE("npv trigger at the baseline")
{
    CostParams p;
    DemandParams d;
    CapacitySpec cap;
    auto decision = npv_trigger(p, d, cap);
    REQUIRE(decision);
    CHECK(decision->q_npv == doctest::Approx(5.4).epsilon(0.1 / 5.4));
    CHECK(decision->dK_npv == 40.0);

    // the envelope changes sign at the trigger
    auto envelope = [&](double q) {
        double best = -INFINITY;
        for (double dK : cap.expansion_grid())
            best = std::max(best, det_value(q, dK, cap.K0, p, d.eta));
        return best;
    };
    CHECK(envelope(decision->q_npv + 2e-3) >= 0.0);
    CHECK(envelope(decision->q_npv - 2e-3) < 0.0);
    const double scale = std::abs(det_value_coefficients(40.0, 40.0, p, d.eta).A3);
    CHECK(std::abs(det_value(decision->q_npv, 40.0, 40.0, p, d.eta)) < 1e-3 * scale);
}

TEST_CASE("npv trigger grows with the expansion size")
{
    CostParams p;
    DemandParams d;
    CapacitySpec cap;
    auto t40 = npv_trigger_for_size(40.0, p, d, cap);
    auto t80 = npv_trigger_for_size(80.0, p, d, cap);
    REQUIRE(t40);
    REQUIRE(t80);
    CHECK(*t80 > *t40);
    double prev = 0.0;
    for (double dK : cap.expansion_grid()) {
        if (dK == 0.0)
            continue;
        auto t = npv_trigger_for_size(dK, p, d, cap);
        REQUIRE(t);
        CHECK(*t >= prev);
        prev = *t;
    }
}

TEST_CASE("prohibitive fixed cost means no finite trigger")
{
    CostParams p;
    p.f = 1e15;
    CHECK_FALSE(npv_trigger(p, DemandParams{}, CapacitySpec{}).has_value());
}

TEST_CASE("npv trigger needs rho above eta")
{
    CostParams p;
    DemandParams d;
    d.eta = 0.08;
    try {
        npv_trigger(p, d, CapacitySpec{});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key() == "rho");
    }
}

TEST_CASE("best expansion size is a staircase in demand")
{
    CostParams p;
    CapacitySpec cap;
    double prev = 0.0;
    for (double q = 0.5; q < 200.0; q *= 1.02) {
        double best_dK = 0.0;
        double best = -INFINITY;
        for (double dK : cap.expansion_grid()) {
            double v = det_value(q, dK, cap.K0, p, 0.02);
            if (v > best) {
                best = v;
                best_dK = dK;
            }
        }
        CHECK(best_dK >= prev);
        prev = best_dK;
    }
}
