#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "qcurv/moduli.hpp"
#include "qcurv/operators.hpp"
#include "qcurv/simplex.hpp"
#include "qcurv/spectra.hpp"
#include "test_helpers.hpp"

using namespace qcurv;
using testutil::diag;
using testutil::linspace;
using testutil::pauli;

namespace {

OperatorPair qubit_pair() { return {pauli('Z'), pauli('X'), "Z", "X", 1, false}; }

OperatorPair step_pair() {
    // Joint eigenpoints (1, 0) and (-1, 1); level crossing at g = 2.
    return {diag({1, -1}), diag({0, 1}), "D1", "D2", 1, false};
}

void check_energy_consistency(const BoundaryCurve& curve) {
    for (const auto& p : curve.points)
        CHECK(std::abs(p.e0 - (p.h1 + p.g * p.h2)) <= 1e-9 * std::max(1.0, std::abs(p.e0)));
}

BoundaryCurve synthetic_curve(const std::vector<std::array<double, 3>>& rows) {
    BoundaryCurve curve;
    for (const auto& [g, h1, h2] : rows) {
        BoundaryPoint p;
        p.g = g;
        p.h1 = h1;
        p.h2 = h2;
        curve.points.push_back(p);
    }
    return curve;
}

}  // namespace

TEST_CASE("qubit sweep lies on the unit circle") {
    const auto curve = sweep_boundary(qubit_pair(), linspace(0.1, 10.0, 80));
    for (const auto& p : curve.points) {
        CHECK(std::abs(p.h1 * p.h1 + p.h2 * p.h2 - 1.0) <= 1e-9);
        CHECK(!p.degenerate);
        CHECK(p.gap >= 0.0);
    }
    check_energy_consistency(curve);
}

TEST_CASE("two-site TFIM sweep matches the closed form") {
    const auto pair = build_tfim(2, true);
    const auto grid = linspace(0.2, 4.0, 40);
    const auto curve = sweep_boundary(pair, grid);
    for (const auto& p : curve.points) {
        const double r = std::sqrt(1.0 + p.g * p.g);
        CHECK(p.h1 == doctest::Approx(-1.0 / r).epsilon(1e-10));
        CHECK(p.h2 == doctest::Approx(-p.g / r).epsilon(1e-10));
        CHECK(p.e0 == doctest::Approx(-r).epsilon(1e-10));
    }
    check_energy_consistency(curve);
}

TEST_CASE("commuting-pair sweep stays on the polygon boundary") {
    const auto pair = step_pair();
    const auto hull = moduli_polytope_2d(pair);
    const auto curve = sweep_boundary(pair, linspace(0.5, 3.5, 61));
    for (const auto& p : curve.points)
        CHECK(std::abs(polygon_margin(hull, {p.h1, p.h2})) <= 1e-9);
    check_energy_consistency(curve);
}

TEST_CASE("sweep is deterministic across worker counts") {
    const auto pair = build_tfim(4, true);
    const auto grid = linspace(0.3, 2.0, 16);
    SweepOptions serial;
    serial.max_workers = 1;
    SweepOptions parallel;
    parallel.max_workers = 4;
    const auto a = sweep_boundary(pair, grid, serial);
    const auto b = sweep_boundary(pair, grid, parallel);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].h1 == b.points[i].h1);
        CHECK(a.points[i].h2 == b.points[i].h2);
        CHECK(a.points[i].e0 == b.points[i].e0);
        CHECK(a.points[i].kappa_spectral == b.points[i].kappa_spectral);
    }
}

TEST_CASE("sweep rejects bad grids") {
    CHECK_THROWS_AS(sweep_boundary(qubit_pair(), std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(sweep_boundary(qubit_pair(), std::vector<double>{1.0, 1.0}),
                    ValidationError);
}

TEST_CASE("spectral curvature is 1 on the constant-curvature oracles") {
    const auto qubit = qubit_pair();
    const auto tfim2 = build_tfim(2, true);
    for (const double g : {0.2, 0.7, 1.0, 2.5, 8.0}) {
        const auto dq = eigendecompose(OperatorMatrix(qubit.h1 + g * qubit.h2));
        CHECK(curvature_from_spectrum(qubit, g, dq) == doctest::Approx(1.0).epsilon(1e-10));
        const auto dt = eigendecompose(OperatorMatrix(tfim2.h1 + g * tfim2.h2));
        CHECK(curvature_from_spectrum(tfim2, g, dt) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("spectral curvature flags flat directions and degeneracy") {
    const auto pair = step_pair();
    const auto d = eigendecompose(OperatorMatrix(pair.h1 + 1.0 * pair.h2));
    CHECK(std::isinf(curvature_from_spectrum(pair, 1.0, d)));  // E linear in g

    const auto dd = eigendecompose(OperatorMatrix(pair.h1 + 2.0 * pair.h2));
    CHECK_THROWS_AS(curvature_from_spectrum(pair, 2.0, dd), NumericalError);
}

TEST_CASE("finite-difference curvature reproduces the unit circle") {
    const auto curve = sweep_boundary(qubit_pair(), linspace(0.5, 2.0, 301));
    for (std::size_t i = 1; i + 1 < curve.points.size(); i += 25)
        CHECK(std::abs(curvature_finite_difference(curve, i) - 1.0) <= 1e-4);
}

TEST_CASE("finite-difference curvature is zero on straight segments") {
    const auto curve = synthetic_curve({{0.0, 0.0, 0.0},
                                        {0.5, 0.5, -0.25},
                                        {1.0, 1.0, -0.5},
                                        {1.5, 1.5, -0.75}});
    CHECK(curvature_finite_difference(curve, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(curvature_finite_difference(curve, 2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(curvature_finite_difference(curve, 0), ValidationError);
    CHECK_THROWS_AS(curvature_finite_difference(curve, 3), ValidationError);
}

TEST_CASE("finite-difference curvature rejects degenerate stencils") {
    auto curve = synthetic_curve({{0.0, 0.0, 0.0}, {0.5, 0.5, 0.1}, {1.0, 1.0, 0.3}});
    curve.points[2].degenerate = true;
    CHECK_THROWS_AS(curvature_finite_difference(curve, 1), NumericalError);
}

TEST_CASE("spectral and finite-difference curvature estimators agree") {
    // TFIM L = 8 near the gap minimum, grid step 1e-2.
    const auto pair = build_tfim(8, true);
    const auto curve = sweep_boundary(pair, linspace(0.96, 1.04, 9));
    for (std::size_t i = 1; i + 1 < curve.points.size(); ++i) {
        const double ks = curve.points[i].kappa_spectral;
        const double kf = curvature_finite_difference(curve, i);
        CHECK(std::abs(ks - kf) <= 1e-3);
        CHECK(ks >= -1e-10);
    }
}

TEST_CASE("estimator agreement on random dim-8 pencils") {
    for (const std::uint64_t seed : {11u, 12u, 13u}) {
        OperatorPair pair{random_hermitian(8, seed), random_hermitian(8, seed + 100),
                          "R1", "R2", 1, false};
        const auto curve = sweep_boundary(pair, linspace(0.496, 0.504, 5));
        const std::size_t mid = 2;
        if (curve.points[mid].gap < 1e-3) continue;  // skip accidental near-crossing
        const double ks = curve.points[mid].kappa_spectral;
        const double kf = curvature_finite_difference(curve, mid);
        CHECK(std::abs(ks - kf) <= std::max(1e-3, 1e-2 * std::abs(ks)));
    }
}

TEST_CASE("check_normal: the coupling vector is normal to the boundary") {
    // Qubit at g = 1: tangent ~ (-1, 1), normal (1, 1).
    const auto curve = sweep_boundary(qubit_pair(), linspace(0.98, 1.02, 5));
    CHECK(check_normal(curve, 2) <= 1e-4);

    // TFIM L = 8 at g = 0.5 with step 1e-2.
    const auto pair = build_tfim(8, true);
    const auto tcurve = sweep_boundary(pair, linspace(0.48, 0.52, 5));
    CHECK(check_normal(tcurve, 2) <= 5e-3);
}

TEST_CASE("check_normal across a polygon edge and on flat runs") {
    const auto pair = step_pair();
    const auto curve = sweep_boundary(pair, linspace(0.5, 3.5, 301));  // step 1e-2
    // Locate the jump interval; the central-difference tangent there is the
    // polygon edge, and lambda(g) is its normal within one grid step.
    std::size_t jump = 0;
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const double d = std::hypot(curve.points[i + 1].h1 - curve.points[i].h1,
                                    curve.points[i + 1].h2 - curve.points[i].h2);
        if (d > best) {
            best = d;
            jump = i;
        }
    }
    const double cosine = check_normal(curve, jump);
    CHECK(cosine <= 2e-2);
    // Inside a constant run the tangent has zero length: reported as NaN.
    CHECK(std::isnan(check_normal(curve, jump > 10 ? jump - 5 : jump + 5)));
}

TEST_CASE("check_convexity on curved, straight, and concave data") {
    const auto qubit = sweep_boundary(qubit_pair(), linspace(0.2, 5.0, 60));
    CHECK(check_convexity(qubit) > 0.0);

    const auto concave = synthetic_curve({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {2.0, 2.0, 0.0}});
    CHECK(check_convexity(concave) == doctest::Approx(-2.0).epsilon(1e-12));

    const auto pair = build_tfim(10, true);
    const auto curve = sweep_boundary(pair, linspace(0.2, 3.0, 21));
    CHECK(check_convexity(curve) >= -1e-9);
    check_energy_consistency(curve);
}

TEST_CASE("Hellmann-Feynman residuals") {
    const auto [r1q, r2q] = hellmann_feynman_residuals(qubit_pair(), 1.0, 1e-4);
    CHECK(r1q <= 1e-7);
    CHECK(r2q <= 1e-7);

    const auto [r1t, r2t] = hellmann_feynman_residuals(build_tfim(2, true), 0.5, 1e-4);
    CHECK(r1t <= 1e-7);
    CHECK(r2t <= 1e-7);

    // Commuting pair away from the crossing: E is linear, residuals vanish.
    const auto [r1c, r2c] = hellmann_feynman_residuals(step_pair(), 1.0, 1e-4);
    CHECK(r1c <= 1e-12);
    CHECK(r2c <= 1e-12);

    // Degeneracy inside the stencil is rejected.
    CHECK_THROWS_AS(hellmann_feynman_residuals(step_pair(), 2.0, 1e-4), NumericalError);
}

TEST_CASE("trace_branches: qubit branches are antipodal") {
    const auto branches = trace_branches(qubit_pair(), linspace(0.2, 3.0, 15), 2);
    REQUIRE(branches.size() == 2);
    for (std::size_t i = 0; i < branches[0].points.size(); ++i) {
        CHECK(branches[1].points[i].h1 ==
              doctest::Approx(-branches[0].points[i].h1).epsilon(1e-10));
        CHECK(branches[1].points[i].h2 ==
              doctest::Approx(-branches[0].points[i].h2).epsilon(1e-10));
    }
}

TEST_CASE("trace_branches: commuting branches sit at joint eigenpoints") {
    const auto branches = trace_branches(step_pair(), linspace(0.5, 3.5, 20), 2);
    for (const auto& branch : branches)
        for (const auto& p : branch.points) {
            const bool at_first = std::abs(p.h1 - 1.0) < 1e-9 && std::abs(p.h2) < 1e-9;
            const bool at_second = std::abs(p.h1 + 1.0) < 1e-9 && std::abs(p.h2 - 1.0) < 1e-9;
            CHECK((at_first || at_second));
        }
}

TEST_CASE("trace_branches: TFIM L=4 lowest branches approach near g=1") {
    const auto pair = build_tfim(4, true);
    const auto grid = linspace(0.2, 3.0, 57);
    const auto branches = trace_branches(pair, grid, 4);
    double min_gap = 1e300;
    double argmin = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double gap = branches[1].points[i].energy - branches[0].points[i].energy;
        if (gap < min_gap) {
            min_gap = gap;
            argmin = grid[i];
        }
    }
    CHECK(argmin > 0.5);
    CHECK(argmin < 1.5);
    CHECK_THROWS_AS(trace_branches(pair, grid, 17), ValidationError);
}

TEST_CASE("detect_transition: hull-vertex jump is type I") {
    const auto curve = sweep_boundary(step_pair(), linspace(0.5, 3.5, 100));
    const auto report = detect_transition(curve, default_jump_tol(curve), 0.5);
    CHECK(report.kind == TransitionKind::type_I);
    CHECK(std::abs(report.g_star - 2.0) <= 3.0 / 99.0);
    CHECK(report.delta_h1 == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(report.delta_h2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isinf(report.kappa_min));  // every segment is flat
}

TEST_CASE("detect_transition: constant-curvature circle reports none") {
    const auto curve = sweep_boundary(qubit_pair(), linspace(0.5, 2.0, 100));
    const auto report = detect_transition(curve, 0.5, 0.5);
    CHECK(report.kind == TransitionKind::none);
    CHECK(report.kappa_min == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::isnan(report.g_star));
}

TEST_CASE("detect_transition: TFIM curvature dip is type II") {
    const auto pair = build_tfim(8, true);
    const auto curve = sweep_boundary(pair, linspace(0.2, 3.0, 60));
    const auto report = detect_transition(curve, default_jump_tol(curve), 0.5);
    CHECK(report.kind == TransitionKind::type_II);
    CHECK(std::abs(report.g_star - 1.0) <= 0.15);
    CHECK(report.delta_h1 == 0.0);
    CHECK(report.delta_h2 == 0.0);
    CHECK(report.gap_min > 0.0);
}
