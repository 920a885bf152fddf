#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace runway {

/// Tuning knobs shared by the trigger searches.
struct SearchOptions {
    double q_min = 0.1;               ///< lower end of the demand search range
    int npv_grid_points = 2000;
    int option_grid_points = 4000;
    double npv_tolerance = 1e-3;      ///< bisection width, ops/hour
    double option_tolerance = 1e-7;   ///< golden-section width, ops/hour
    double singular_tolerance = 1e-9;
    double resonance_tolerance = 1e-9;
};

/// n log-spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int n)
{
    if (!(lo > 0.0 && hi > lo && n >= 2))
        throw std::invalid_argument("log_grid needs 0 < lo < hi and n >= 2");
    std::vector<double> grid(static_cast<std::size_t>(n));
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / (n - 1);
    for (int i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] = std::exp(log_lo + step * i);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

/// Maximiser of a unimodal f on [lo, hi], to an interval width of `tol`.
template <class F>
double golden_section_max(F&& f, double lo, double hi, double tol)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        if (x1 >= x2)  // interval below floating-point resolution
            break;
    }
    return f1 < f2 ? x2 : x1;
}

/// Smallest point (to `tol`) where a predicate flips from false at lo to true at hi.
/// Returns the upper end of the final bracket, where the predicate holds.
template <class Pred>
double bisect_first_true(Pred&& holds, double lo, double hi, double tol)
{
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (holds(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace runway
