#include "qcurv/moduli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace qcurv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_grid(std::span<const double> g_grid) {
    if (g_grid.empty()) throw ValidationError("sweep: empty coupling grid");
    for (std::size_t i = 0; i < g_grid.size(); ++i) {
        if (!std::isfinite(g_grid[i])) throw ValidationError("sweep: non-finite coupling");
        if (i > 0 && !(g_grid[i] > g_grid[i - 1]))
            throw ValidationError("sweep: coupling grid must be strictly increasing");
    }
}

int pick_workers(Eigen::Index dim, std::size_t tasks, int requested) {
    if (requested > 0) return std::min<std::size_t>(requested, tasks);
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 2;
    // Large dense problems hold ~3 matrices each; keep memory bounded.
    std::size_t cap = hw;
    if (dim >= 8192) cap = 1;
    else if (dim >= 4096) cap = std::min<std::size_t>(hw, 4);
    else if (dim >= 2048) cap = std::min<std::size_t>(hw, 8);
    return static_cast<int>(std::min(cap, tasks));
}

// Runs fn(i) for i in [0, n) on `workers` threads. Exceptions are captured
// and rethrown after join.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    // Single-threaded BLAS inside workers; grid-level parallelism wins.
    internal::set_blas_threads(1);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    internal::set_blas_threads(0 /* reset request ignored if unsupported */);
    if (error) std::rethrow_exception(error);
}

double averaged_expectation(const OperatorMatrix& op, const Eigen::MatrixXcd& states) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < states.cols(); ++k)
        sum += expectation(op, states.col(k));
    return sum / static_cast<double>(states.cols());
}

struct Stencil {
    double d1x, d1y;  // first derivatives of (h1, h2) w.r.t. g
    double d2x, d2y;  // second derivatives
};

Stencil central_differences(const BoundaryCurve& curve, std::size_t i) {
    const auto& p = curve.points;
    const double s1 = p[i].g - p[i - 1].g;
    const double s2 = p[i + 1].g - p[i].g;
    const double w_m1 = -s2 / (s1 * (s1 + s2));
    const double w_0 = (s2 - s1) / (s1 * s2);
    const double w_p1 = s1 / (s2 * (s1 + s2));
    const double v_m1 = 2.0 / (s1 * (s1 + s2));
    const double v_0 = -2.0 / (s1 * s2);
    const double v_p1 = 2.0 / (s2 * (s1 + s2));
    Stencil st;
    st.d1x = w_m1 * p[i - 1].h1 + w_0 * p[i].h1 + w_p1 * p[i + 1].h1;
    st.d1y = w_m1 * p[i - 1].h2 + w_0 * p[i].h2 + w_p1 * p[i + 1].h2;
    st.d2x = v_m1 * p[i - 1].h1 + v_0 * p[i].h1 + v_p1 * p[i + 1].h1;
    st.d2y = v_m1 * p[i - 1].h2 + v_0 * p[i].h2 + v_p1 * p[i + 1].h2;
    return st;
}

}  // namespace

std::string to_string(TransitionKind kind) {
    switch (kind) {
        case TransitionKind::type_I: return "type_I";
        case TransitionKind::type_II: return "type_II";
        default: return "none";
    }
}

BoundaryCurve sweep_boundary(const OperatorPair& pair, std::span<const double> g_grid,
                             const SweepOptions& options) {
    validate_pair(pair);
    validate_grid(g_grid);

    BoundaryCurve curve;
    curve.info = {pair.label1, pair.label2, pair.site_count, pair.normalized_per_site,
                  options.degeneracy_tol};
    curve.points.resize(g_grid.size());

    const int workers = pick_workers(pair.dim(), g_grid.size(), options.max_workers);
    parallel_for(g_grid.size(), workers, [&](std::size_t i) {
        const double g = g_grid[i];
        const OperatorMatrix h = pair.h1 + g * pair.h2;
        const SpectralDecomposition d = eigendecompose(h);
        const GroundState gs = ground_state(d, options.degeneracy_tol);

        BoundaryPoint pt;
        pt.g = g;
        const double lnorm = std::hypot(1.0, g);
        pt.lambda1 = 1.0 / lnorm;
        pt.lambda2 = g / lnorm;
        pt.e0 = gs.e0;
        pt.gap = d.dim() >= 2 ? spectral_gap(d) : 0.0;
        pt.degenerate = gs.multiplicity > 1;
        pt.h1 = averaged_expectation(pair.h1, gs.states);
        pt.h2 = averaged_expectation(pair.h2, gs.states);
        pt.kappa_spectral = pt.degenerate
                                ? kNaN
                                : curvature_from_spectrum(pair, g, d, options.degeneracy_tol);
        curve.points[i] = pt;
    });
    return curve;
}

double curvature_from_spectrum(const OperatorPair& pair, double g,
                               const SpectralDecomposition& decomp, double degeneracy_tol) {
    const Eigen::Index n = decomp.dim();
    if (n < 2) throw ValidationError("curvature_from_spectrum: needs dim >= 2");
    if (pair.dim() != n) throw ValidationError("curvature_from_spectrum: dimension mismatch");
    const double tol = degeneracy_tol > 0.0 ? degeneracy_tol : default_degeneracy_tol(decomp);
    if (decomp.eigenvalues(1) - decomp.eigenvalues(0) <= tol)
        throw NumericalError("curvature_from_spectrum: degenerate ground state, curvature undefined");

    // E''(g) = 2 sum_{k>0} |<k|H2|0>|^2 / (E0 - Ek): all terms nonpositive.
    const StateVector w = pair.h2 * decomp.eigenvectors.col(0);
    const StateVector overlaps = decomp.eigenvectors.adjoint() * w;
    const double e0 = decomp.eigenvalues(0);
    double e2 = 0.0;
    for (Eigen::Index k = 1; k < n; ++k)
        e2 += std::norm(overlaps(k)) / (e0 - decomp.eigenvalues(k));
    e2 *= 2.0;

    if (std::abs(e2) < 1e-14) return kInf;  // flat (commuting) direction
    return -1.0 / (std::pow(1.0 + g * g, 1.5) * e2);
}

double curvature_finite_difference(const BoundaryCurve& curve, std::size_t index) {
    const auto& p = curve.points;
    if (p.size() < 3 || index < 1 || index > p.size() - 2)
        throw ValidationError("curvature_finite_difference: index must be interior");
    for (std::size_t k = index - 1; k <= index + 1; ++k)
        if (p[k].degenerate)
            throw NumericalError("curvature_finite_difference: degenerate point in stencil");

    const Stencil st = central_differences(curve, index);
    const double speed2 = st.d1x * st.d1x + st.d1y * st.d1y;
    const double scale = std::max({std::abs(p[index - 1].h1), std::abs(p[index].h1),
                                   std::abs(p[index + 1].h1), std::abs(p[index - 1].h2),
                                   std::abs(p[index].h2), std::abs(p[index + 1].h2), 1.0});
    const double span = (p[index + 1].g - p[index - 1].g);
    if (std::sqrt(speed2) <= 1e-14 * scale / span) return 0.0;  // stationary stencil
    return (st.d1x * st.d2y - st.d2x * st.d1y) / std::pow(speed2, 1.5);
}

double check_normal(const BoundaryCurve& curve, std::size_t index) {
    const auto& p = curve.points;
    if (p.size() < 3 || index < 1 || index > p.size() - 2)
        throw ValidationError("check_normal: index must be interior");
    if (p[index].degenerate)
        throw NumericalError("check_normal: degenerate point");
    const double tx = p[index + 1].h1 - p[index - 1].h1;
    const double ty = p[index + 1].h2 - p[index - 1].h2;
    const double tnorm = std::hypot(tx, ty);
    const double scale = std::max({std::abs(p[index - 1].h1), std::abs(p[index + 1].h1),
                                   std::abs(p[index - 1].h2), std::abs(p[index + 1].h2), 1.0});
    if (tnorm <= 1e-14 * scale) return kNaN;  // zero-length tangent, reported not failed
    const double g = p[index].g;
    return std::abs(tx + g * ty) / (std::hypot(1.0, g) * tnorm);
}

double check_convexity(const BoundaryCurve& curve) {
    const auto& p = curve.points;
    if (p.size() < 3) throw ValidationError("check_convexity: needs at least 3 points");
    double min_cross = kInf;
    for (std::size_t i = 0; i + 2 < p.size(); ++i) {
        const double ax = p[i + 1].h1 - p[i].h1;
        const double ay = p[i + 1].h2 - p[i].h2;
        const double bx = p[i + 2].h1 - p[i + 1].h1;
        const double by = p[i + 2].h2 - p[i + 1].h2;
        min_cross = std::min(min_cross, ax * by - ay * bx);
    }
    return min_cross;
}

std::pair<double, double> hellmann_feynman_residuals(const OperatorPair& pair, double g,
                                                     double step) {
    if (!(step > 0.0)) throw ValidationError("hellmann_feynman_residuals: step must be positive");
    validate_pair(pair);

    auto ground_at = [&](double gv) {
        const SpectralDecomposition d = eigendecompose(OperatorMatrix(pair.h1 + gv * pair.h2));
        const GroundState gs = ground_state(d);
        if (gs.multiplicity > 1)
            throw NumericalError("hellmann_feynman_residuals: degeneracy in stencil");
        return gs;
    };

    const GroundState center = ground_at(g);
    const double e_plus = ground_at(g + step).e0;
    const double e_minus = ground_at(g - step).e0;

    const double h1v = expectation(pair.h1, center.states.col(0));
    const double h2v = expectation(pair.h2, center.states.col(0));
    const double efd = (e_plus - e_minus) / (2.0 * step);
    const double r2 = std::abs(h2v - efd);
    const double r1 = std::abs(h1v - (center.e0 - g * efd));
    return {r1, r2};
}

std::vector<BranchCurve> trace_branches(const OperatorPair& pair, std::span<const double> g_grid,
                                        int k_max, const SweepOptions& options) {
    validate_pair(pair);
    validate_grid(g_grid);
    if (k_max < 1 || k_max > pair.dim())
        throw ValidationError("trace_branches: k_max must lie in [1, dim]");

    std::vector<BranchCurve> branches(static_cast<std::size_t>(k_max));
    for (int k = 0; k < k_max; ++k) {
        branches[k].index = k;
        branches[k].points.resize(g_grid.size());
    }
    const int workers = pick_workers(pair.dim(), g_grid.size(), options.max_workers);
    parallel_for(g_grid.size(), workers, [&](std::size_t i) {
        const double g = g_grid[i];
        const SpectralDecomposition d = eigendecompose(OperatorMatrix(pair.h1 + g * pair.h2));
        for (int k = 0; k < k_max; ++k) {
            const auto psi = d.eigenvectors.col(k);
            branches[k].points[i] = {g, expectation(pair.h1, psi), expectation(pair.h2, psi),
                                     d.eigenvalues(k)};
        }
    });
    return branches;
}

double default_jump_tol(const BoundaryCurve& curve) {
    const auto& p = curve.points;
    if (p.size() < 2) throw ValidationError("default_jump_tol: needs at least 2 points");
    std::vector<double> disp;
    disp.reserve(p.size() - 1);
    double lo_x = kInf, hi_x = -kInf, lo_y = kInf, hi_y = -kInf;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        disp.push_back(std::hypot(p[i + 1].h1 - p[i].h1, p[i + 1].h2 - p[i].h2));
        lo_x = std::min(lo_x, p[i].h1); hi_x = std::max(hi_x, p[i].h1);
        lo_y = std::min(lo_y, p[i].h2); hi_y = std::max(hi_y, p[i].h2);
    }
    std::sort(disp.begin(), disp.end());
    const double median = disp[disp.size() / 2];
    const double range = std::hypot(hi_x - lo_x, hi_y - lo_y);
    return std::max(10.0 * median, 1e-9 * std::max(range, 1.0));
}

TransitionReport detect_transition(const BoundaryCurve& curve, double jump_tol,
                                   double kappa_tol) {
    const auto& p = curve.points;
    if (p.size() < 5) throw ValidationError("detect_transition: needs at least 5 points");
    if (!(jump_tol > 0.0) || !(kappa_tol > 0.0))
        throw ValidationError("detect_transition: tolerances must be positive");

    TransitionReport report;
    report.gap_min = kInf;
    report.kappa_min = kInf;
    double max_jump = 0.0;
    std::size_t jump_at = 0;
    double kappa_argmin = kNaN;
    for (std::size_t i = 0; i < p.size(); ++i) {
        report.gap_min = std::min(report.gap_min, p[i].gap);
        const double k = p[i].kappa_spectral;
        if (std::isfinite(k) && k < report.kappa_min) {
            report.kappa_min = k;
            kappa_argmin = p[i].g;
        }
        if (i + 1 < p.size()) {
            const double jump = std::hypot(p[i + 1].h1 - p[i].h1, p[i + 1].h2 - p[i].h2);
            if (jump > max_jump) {
                max_jump = jump;
                jump_at = i;
            }
        }
    }

    if (max_jump > jump_tol) {
        report.kind = TransitionKind::type_I;
        report.g_star = 0.5 * (p[jump_at].g + p[jump_at + 1].g);
        report.delta_h1 = p[jump_at].h1 - p[jump_at + 1].h1;
        report.delta_h2 = p[jump_at].h2 - p[jump_at + 1].h2;
    } else if (report.kappa_min < kappa_tol) {
        report.kind = TransitionKind::type_II;
        report.g_star = kappa_argmin;
    } else {
        report.kind = TransitionKind::none;
        report.g_star = kNaN;
    }
    return report;
}

}  // namespace qcurv
