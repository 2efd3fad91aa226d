#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qcurv/operators.hpp"

namespace qcurv {

/// Pairwise-commuting operators with their joint eigenvalue matrix:
/// lambda_matrix(i, j) is the eigenvalue of ops[i] on the shared
/// eigenvector basis.col(j).
struct CommutingFamily {
    std::vector<OperatorMatrix> ops;
    Eigen::MatrixXd lambda_matrix;  // n x N
    Eigen::MatrixXcd basis;         // N x N, common orthonormal eigenvectors

    Eigen::Index size() const { return static_cast<Eigen::Index>(ops.size()); }
    Eigen::Index dim() const { return ops.empty() ? 0 : ops.front().rows(); }
};

struct CommutationReport {
    bool commuting = false;
    double max_violation = 0.0;
    int worst_i = -1, worst_j = -1;
};

/// All pairwise commutator norms <= tol?
CommutationReport verify_commuting(std::span<const OperatorMatrix> ops, double tol);

/// Relative commutation tolerance used throughout: 1e-10 * max |entries|.
double commuting_tol(std::span<const OperatorMatrix> ops);

/// Simultaneous diagonalization: decompose a seeded random real-coefficient
/// combination, then refine inside residual eigenvalue clusters operator by
/// operator. Up to 3 randomized attempts before a diagnostic error.
CommutingFamily joint_diagonalize(std::span<const OperatorMatrix> ops,
                                  std::uint64_t seed = 20240901);

/// Convex hull of the N joint eigenpoints (lambda_1j, lambda_2j):
/// counterclockwise, starting at the lexicographic minimum, collinear
/// interior points excluded. Equals the moduli space of a commuting pair.
std::vector<Eigen::Vector2d> moduli_polytope_2d(const OperatorPair& pair);

/// Signed distance of a point to a convex polygon boundary: positive
/// inside, negative outside (hulls of 1 or 2 vertices give -distance).
double polygon_margin(std::span<const Eigen::Vector2d> hull, const Eigen::Vector2d& point);

/// Margins of the inequality system for a square joint spectrum: with
/// h_j = <psi|H_j|psi>/<psi|psi>, returns Lambda^{-1} h, which equals the
/// squared amplitudes of psi in the joint eigenbasis (so each margin is
/// >= 0 up to rounding and they sum to 1). With ops.back() = identity this
/// is the constant-row form of the simplex inequalities. Requires n = N
/// and condition number below 1e12.
Eigen::VectorXd membership(const CommutingFamily& family, const StateVector& psi);

/// Appends the identity so the family carries the constant row.
std::vector<OperatorMatrix> with_identity(std::span<const OperatorMatrix> ops);

}  // namespace qcurv
