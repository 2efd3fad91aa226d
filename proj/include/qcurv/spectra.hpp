#pragma once

#include <Eigen/Dense>

#include "qcurv/operators.hpp"

namespace qcurv {

/// Full eigensystem of a Hermitian operator, eigenvalues ascending,
/// eigenvector k in column k.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
    double spectral_width() const {
        return dim() > 0 ? eigenvalues(dim() - 1) - eigenvalues(0) : 0.0;
    }
};

/// Dense direct decomposition (LAPACK divide and conquer; real-symmetric
/// inputs are detected and solved in real arithmetic). Deterministic up to
/// the canonicalization below: each eigenvector's first significant
/// component is rotated real positive, and within a degenerate cluster the
/// basis is rebuilt from projections of the standard basis vectors taken
/// in index order.
SpectralDecomposition eigendecompose(const OperatorMatrix& a);

struct GroundState {
    double e0 = 0.0;
    int multiplicity = 0;
    Eigen::MatrixXcd states;  // orthonormal columns spanning the ground eigenspace
};

/// Relative default: 1e-9 * max(1, spectral width).
double default_degeneracy_tol(const SpectralDecomposition& d);

/// degeneracy_tol <= 0 selects the default.
GroundState ground_state(const SpectralDecomposition& d, double degeneracy_tol = -1.0);

/// <psi|A|psi> / <psi|psi>; rejects zero states and flags imaginary residue
/// beyond 1e-10 (signals a non-Hermitian operator or a broken state).
double expectation(const OperatorMatrix& a, const StateVector& psi);

/// E_1 - E_0 (0 for an exactly degenerate ground level). Requires dim >= 2.
double spectral_gap(const SpectralDecomposition& d);

namespace internal {
/// Sets OpenBLAS thread count if the symbol is available; returns previous
/// wish (best effort, used to serialize BLAS when sweeping in parallel).
void set_blas_threads(int n);
}  // namespace internal

}  // namespace qcurv
