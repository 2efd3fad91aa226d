#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "qcurv/errors.hpp"

namespace qcurv {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 abscissae/weights (positive half; QUADPACK dqk15).
inline constexpr double kK15Nodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double kK15Weights[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278};
// Gauss-7 weights, paired with nodes 1, 3, 5, 7 above.
inline constexpr double kG7Weights[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double k15 = kK15Weights[7] * f(mid);
    double g7 = kG7Weights[3] * f(mid);
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kK15Nodes[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        k15 += kK15Weights[i] * fsum;
        if (i % 2 == 1) g7 += kG7Weights[i / 2] * fsum;
    }
    k15 *= half;
    g7 *= half;
    return {k15, std::abs(k15 - g7)};
}

}  // namespace detail

/// Adaptive bisection with a G7/K15 error estimate per interval. Splits
/// until each interval's estimate fits its length-proportional share of
/// abs_tol, so integrable endpoint singularities resolve by subdivision.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    int max_intervals = 100000) {
    if (!(a < b)) throw ValidationError("integrate_adaptive: requires a < b");
    if (!(abs_tol > 0.0)) throw ValidationError("integrate_adaptive: tolerance must be positive");

    struct Interval {
        double a, b;
    };
    std::vector<Interval> stack{{a, b}};
    const double total = b - a;
    QuadratureResult res;
    int used = 1;
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        auto [val, err] = detail::gk15(f, iv.a, iv.b);
        res.evaluations += 15;
        const double len = iv.b - iv.a;
        const double mid = 0.5 * (iv.a + iv.b);
        // Stop refining once the estimate meets the local budget or the
        // interval has collapsed to machine width.
        if (err <= abs_tol * (len / total) || !(iv.a < mid && mid < iv.b)) {
            res.value += val;
            res.error_estimate += err;
            continue;
        }
        if (used + 1 > max_intervals)
            throw NumericalError("integrate_adaptive: interval budget exhausted");
        used += 1;
        stack.push_back({mid, iv.b});
        stack.push_back({iv.a, mid});
    }
    return res;
}

}  // namespace qcurv
