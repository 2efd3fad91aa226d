#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcurv/operators.hpp"
#include "qcurv/spectra.hpp"

namespace qcurv {

/// One sampled point of the ground-state boundary. The normal is
/// lambda = (1, g)/||.||; kappa_spectral is NaN where the ground state is
/// degenerate and +inf where the energy is locally linear in g (flat or
/// commuting direction).
struct BoundaryPoint {
    double g = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0;
    double h1 = 0.0, h2 = 0.0;
    double e0 = 0.0;
    double gap = 0.0;
    double kappa_spectral = 0.0;
    bool degenerate = false;
};

struct SweepInfo {
    std::string label1, label2;
    int site_count = 1;
    bool normalized_per_site = false;
    double degeneracy_tol = 0.0;  // the value actually used
};

struct BoundaryCurve {
    std::vector<BoundaryPoint> points;
    SweepInfo info;
};

struct BranchPoint {
    double g = 0.0;
    double h1 = 0.0, h2 = 0.0;
    double energy = 0.0;
};

/// Expectations of one energy-sorted eigenstate along the sweep. Branches
/// follow the sorted index, so they swap partners at level crossings; no
/// eigenvector continuation is attempted.
struct BranchCurve {
    int index = 0;
    std::vector<BranchPoint> points;
};

enum class TransitionKind { none, type_I, type_II };
std::string to_string(TransitionKind kind);

struct TransitionReport {
    TransitionKind kind = TransitionKind::none;
    double g_star = 0.0;
    double kappa_min = 0.0;
    double gap_min = 0.0;
    double delta_h1 = 0.0, delta_h2 = 0.0;  // nonzero only for type I
};

struct SweepOptions {
    double degeneracy_tol = -1.0;  // <= 0: relative default per decomposition
    int max_workers = 0;           // 0: choose from hardware and dimension
};

/// Decomposes h1 + g*h2 at every grid point (concurrently; assembly is
/// g-ordered and deterministic). Degenerate ground spaces report
/// equal-weight averaged expectations and set the degenerate flag.
BoundaryCurve sweep_boundary(const OperatorPair& pair, std::span<const double> g_grid,
                             const SweepOptions& options = {});

/// kappa = -1 / ((1+g^2)^{3/2} E''(g)) with E'' from the exact second-order
/// perturbation sum over all excited states. Requires a nondegenerate
/// ground state; returns +inf when |E''| < 1e-14.
double curvature_from_spectrum(const OperatorPair& pair, double g,
                               const SpectralDecomposition& decomp,
                               double degeneracy_tol = -1.0);

/// Parametric curvature (x'y'' - x''y') / (x'^2 + y'^2)^{3/2} from central
/// differences of (h1, h2) on the (possibly non-uniform) g grid. Positive
/// on counterclockwise (ground-state) curves. A stationary stencil returns 0.
double curvature_finite_difference(const BoundaryCurve& curve, std::size_t index);

/// |cos| of the angle between lambda = (1, g) and the central-difference
/// tangent; ~0 when the normal-vector condition holds. Returns NaN for a
/// zero-length tangent (reported, not failed: happens inside flat runs).
double check_normal(const BoundaryCurve& curve, std::size_t index);

/// Minimum over consecutive triples of the segment cross product
/// (p_{i+1}-p_i) x (p_{i+2}-p_{i+1}); >= 0 (up to rounding) for convex
/// ground-state sweeps in increasing-g orientation.
double check_convexity(const BoundaryCurve& curve);

/// (r1, r2): residuals of <H1> = E - g E' and <H2> = E' with a central
/// finite-difference E' at the given step.
std::pair<double, double> hellmann_feynman_residuals(const OperatorPair& pair, double g,
                                                     double step);

/// Eigenstate branch curves for indices k < k_max.
std::vector<BranchCurve> trace_branches(const OperatorPair& pair, std::span<const double> g_grid,
                                        int k_max, const SweepOptions& options = {});

/// 10x the median adjacent displacement (floored at 1e-9 of the coordinate
/// range, so piecewise-constant curves still get a usable threshold).
double default_jump_tol(const BoundaryCurve& curve);

/// Type I when the largest adjacent jump exceeds jump_tol (delta fields are
/// h(before) - h(after) across the jump); else type II when the smallest
/// finite kappa_spectral is below kappa_tol; else none.
TransitionReport detect_transition(const BoundaryCurve& curve, double jump_tol,
                                   double kappa_tol);

}  // namespace qcurv
