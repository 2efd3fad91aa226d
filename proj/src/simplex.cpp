#include "qcurv/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qcurv/spectra.hpp"

namespace qcurv {

namespace {

double family_scale(std::span<const OperatorMatrix> ops) {
    double scale = 0.0;
    for (const auto& op : ops) scale = std::max(scale, max_abs(op));
    return scale;
}

// Splits [first, last) into runs of near-equal values.
std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_runs(const Eigen::VectorXd& w,
                                                                double tol) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
    Eigen::Index start = 0;
    while (start < w.size()) {
        Eigen::Index end = start + 1;
        while (end < w.size() && w(end) - w(end - 1) <= tol) ++end;
        runs.emplace_back(start, end);
        start = end;
    }
    return runs;
}

// Diagonalizes each operator restricted to the given block of V's columns,
// splitting the block recursively until every operator is diagonal on it.
void refine_block(Eigen::MatrixXcd& v, Eigen::Index first, Eigen::Index count,
                  std::span<const OperatorMatrix> ops, std::size_t op_index, double tol) {
    if (count <= 1 || op_index >= ops.size()) return;
    auto block = v.middleCols(first, count);
    Eigen::MatrixXcd m = block.adjoint() * (ops[op_index] * block);
    m = 0.5 * (m + m.adjoint().eval());  // symmetrize rounding noise
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    block = (block * es.eigenvectors()).eval();
    const auto runs = cluster_runs(es.eigenvalues(), tol);
    for (const auto& [lo, hi] : runs)
        refine_block(v, first + lo, hi - lo, ops, op_index + 1, tol);
}

}  // namespace

double commuting_tol(std::span<const OperatorMatrix> ops) {
    return 1e-10 * std::max(1.0, family_scale(ops));
}

CommutationReport verify_commuting(std::span<const OperatorMatrix> ops, double tol) {
    if (ops.empty()) throw ValidationError("verify_commuting: empty family");
    for (const auto& op : ops)
        if (op.rows() != ops.front().rows() || op.rows() != op.cols())
            throw ValidationError("verify_commuting: dimension mismatch");
    CommutationReport report;
    report.commuting = true;
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            const double v = commutator_norm(ops[i], ops[j]);
            if (v > report.max_violation) {
                report.max_violation = v;
                report.worst_i = static_cast<int>(i);
                report.worst_j = static_cast<int>(j);
            }
        }
    report.commuting = report.max_violation <= tol;
    return report;
}

CommutingFamily joint_diagonalize(std::span<const OperatorMatrix> ops, std::uint64_t seed) {
    if (ops.empty()) throw ValidationError("joint_diagonalize: empty family");
    for (const auto& op : ops) require_hermitian(op, "joint_diagonalize");
    const auto check = verify_commuting(ops, commuting_tol(ops));
    if (!check.commuting) {
        std::ostringstream msg;
        msg << "joint_diagonalize: operators " << check.worst_i << " and " << check.worst_j
            << " do not commute (violation " << check.max_violation << ")";
        throw ValidationError(msg.str());
    }

    const Eigen::Index n_dim = ops.front().rows();
    const double scale = std::max(1.0, family_scale(ops));
    const double recon_tol = 1e-8 * scale;

    for (int attempt = 0; attempt < 3; ++attempt) {
        std::mt19937_64 rng(seed + 1000003ull * static_cast<std::uint64_t>(attempt));
        std::normal_distribution<double> normal;
        OperatorMatrix combo = OperatorMatrix::Zero(n_dim, n_dim);
        for (const auto& op : ops) combo += normal(rng) * op;
        combo = 0.5 * (combo + combo.adjoint().eval());

        SpectralDecomposition d = eigendecompose(combo);
        Eigen::MatrixXcd v = d.eigenvectors;
        const double ctol = 1e-8 * std::max(1.0, d.spectral_width());
        for (const auto& [lo, hi] : cluster_runs(d.eigenvalues, ctol))
            refine_block(v, lo, hi - lo, ops, 0, 1e-8 * scale);

        CommutingFamily family;
        family.ops.assign(ops.begin(), ops.end());
        family.basis = v;
        family.lambda_matrix.resize(static_cast<Eigen::Index>(ops.size()), n_dim);
        bool ok = true;
        for (std::size_t i = 0; i < ops.size() && ok; ++i) {
            const Eigen::MatrixXcd m = v.adjoint() * (ops[i] * v);
            for (Eigen::Index j = 0; j < n_dim; ++j)
                family.lambda_matrix(static_cast<Eigen::Index>(i), j) = m(j, j).real();
            // Reconstruction check doubles as the off-diagonal residual check.
            const OperatorMatrix rebuilt =
                v * family.lambda_matrix.row(static_cast<Eigen::Index>(i)).asDiagonal() *
                v.adjoint();
            if (max_abs(rebuilt - ops[i]) > recon_tol) ok = false;
        }
        if (ok) return family;
    }
    throw NumericalError("joint_diagonalize: failed to split degeneracies in 3 randomized attempts");
}

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a == b; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    // Andrew monotone chain, strict turns only: collinear points are dropped.
    std::vector<Eigen::Vector2d> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);  // last point repeats the first
    return hull;
}

}  // namespace

std::vector<Eigen::Vector2d> moduli_polytope_2d(const OperatorPair& pair) {
    const OperatorMatrix ops_arr[2] = {pair.h1, pair.h2};
    const std::span<const OperatorMatrix> ops(ops_arr, 2);
    const auto check = verify_commuting(ops, commuting_tol(ops));
    if (!check.commuting) {
        std::ostringstream msg;
        msg << "moduli_polytope_2d: pair does not commute (violation " << check.max_violation
            << ")";
        throw ValidationError(msg.str());
    }
    const CommutingFamily family = joint_diagonalize(ops);
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(family.dim());
    for (Eigen::Index j = 0; j < family.dim(); ++j)
        pts.emplace_back(family.lambda_matrix(0, j), family.lambda_matrix(1, j));
    return convex_hull(std::move(pts));
}

double polygon_margin(std::span<const Eigen::Vector2d> hull, const Eigen::Vector2d& point) {
    if (hull.empty()) throw ValidationError("polygon_margin: empty hull");
    if (hull.size() == 1) return -(point - hull[0]).norm();
    if (hull.size() == 2) {
        // Degenerate polygon: margin is minus the distance to the segment.
        const Eigen::Vector2d v = hull[1] - hull[0];
        const double len2 = v.squaredNorm();
        const double t = std::clamp((point - hull[0]).dot(v) / len2, 0.0, 1.0);
        return -(point - (hull[0] + t * v)).norm();
    }
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Eigen::Vector2d& a = hull[i];
        const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
        const Eigen::Vector2d edge = b - a;
        const double len = edge.norm();
        // CCW hull: inward signed distance from edge line.
        margin = std::min(margin,
                          (edge.x() * (point.y() - a.y()) - edge.y() * (point.x() - a.x())) / len);
    }
    return margin;
}

Eigen::VectorXd membership(const CommutingFamily& family, const StateVector& psi) {
    const Eigen::Index n = family.size();
    const Eigen::Index n_dim = family.dim();
    if (n != n_dim)
        throw ValidationError("membership: joint eigenvalue matrix must be square (n = dim)");
    if (psi.size() != n_dim) throw ValidationError("membership: state dimension mismatch");

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(family.lambda_matrix,
                                                Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double smax = svd.singularValues()(0);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12)) {
        std::ostringstream msg;
        msg << "membership: joint eigenvalue matrix is singular or ill-conditioned "
            << "(condition number " << cond << " exceeds 1e12)";
        throw NumericalError(msg.str());
    }

    Eigen::VectorXd h(n);
    for (Eigen::Index i = 0; i < n; ++i) h(i) = expectation(family.ops[i], psi);
    return svd.solve(h);
}

std::vector<OperatorMatrix> with_identity(std::span<const OperatorMatrix> ops) {
    if (ops.empty()) throw ValidationError("with_identity: empty family");
    std::vector<OperatorMatrix> out(ops.begin(), ops.end());
    out.push_back(OperatorMatrix::Identity(ops.front().rows(), ops.front().cols()));
    return out;
}

}  // namespace qcurv
