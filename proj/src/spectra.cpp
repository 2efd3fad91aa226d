#include "qcurv/spectra.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace qcurv {

namespace internal {

void set_blas_threads(int n) {
    if (openblas_set_num_threads) openblas_set_num_threads(n);
}

}  // namespace internal

namespace {

// Rotate each column so its first component with magnitude above
// 1e-8 * colmax is real positive.
void fix_phases(Eigen::MatrixXcd& v) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        auto col = v.col(k);
        const double colmax = col.cwiseAbs().maxCoeff();
        if (colmax == 0.0) continue;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            const double m = std::abs(col(i));
            if (m > 1e-8 * colmax) {
                col *= std::conj(col(i)) / m;
                break;
            }
        }
    }
}

// Deterministic basis for a degenerate cluster: orthonormalize the
// projections of the standard basis vectors, in index order, onto the
// cluster subspace.
void canonicalize_cluster(Eigen::MatrixXcd& v, Eigen::Index first, Eigen::Index count) {
    const Eigen::Index n = v.rows();
    Eigen::MatrixXcd u = v.middleCols(first, count);
    Eigen::MatrixXcd basis(n, count);
    Eigen::Index built = 0;
    for (Eigen::Index i = 0; i < n && built < count; ++i) {
        // w = P e_i, P the projector onto span(u)
        Eigen::VectorXcd w = u * u.row(i).adjoint();
        for (Eigen::Index k = 0; k < built; ++k)
            w -= basis.col(k).dot(w) * basis.col(k);
        const double nrm = w.norm();
        if (nrm > 1e-6) {
            basis.col(built++) = w / nrm;
        }
    }
    if (built == count) v.middleCols(first, count) = basis;
    // If the projections were too ill-conditioned we keep the solver basis.
}

void canonicalize(SpectralDecomposition& d) {
    const Eigen::Index n = d.dim();
    const double ctol = 1e-10 * std::max(1.0, d.spectral_width());
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && d.eigenvalues(end) - d.eigenvalues(end - 1) <= ctol) ++end;
        if (end - start > 1) canonicalize_cluster(d.eigenvectors, start, end - start);
        start = end;
    }
    fix_phases(d.eigenvectors);
}

}  // namespace

SpectralDecomposition eigendecompose(const OperatorMatrix& a) {
    require_hermitian(a, "eigendecompose");
    const Eigen::Index n = a.rows();

    SpectralDecomposition d;
    d.eigenvalues.resize(n);

    const double scale = max_abs(a);
    const double im_max = a.imag().cwiseAbs().maxCoeff();
    lapack_int info = 0;
    if (im_max <= 1e-13 * (1.0 + scale)) {
        // Real symmetric path: ~4x cheaper than the complex solver.
        Eigen::MatrixXd ar = a.real();
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                              ar.data(), static_cast<lapack_int>(n), d.eigenvalues.data());
        if (info == 0) d.eigenvectors = ar.cast<Complex>();
    } else {
        Eigen::MatrixXcd ac = a;
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                              ac.data(), static_cast<lapack_int>(n), d.eigenvalues.data());
        if (info == 0) d.eigenvectors = std::move(ac);
    }
    if (info != 0) {
        std::ostringstream msg;
        msg << "eigendecompose: LAPACK failed to converge (info=" << info
            << ", dim=" << n << ", max|A|=" << scale << ")";
        throw NumericalError(msg.str());
    }

    canonicalize(d);
    return d;
}

double default_degeneracy_tol(const SpectralDecomposition& d) {
    return 1e-9 * std::max(1.0, d.spectral_width());
}

GroundState ground_state(const SpectralDecomposition& d, double degeneracy_tol) {
    if (d.dim() < 1) throw ValidationError("ground_state: empty decomposition");
    const double tol = degeneracy_tol > 0.0 ? degeneracy_tol : default_degeneracy_tol(d);
    GroundState gs;
    gs.e0 = d.eigenvalues(0);
    Eigen::Index m = 1;
    while (m < d.dim() && d.eigenvalues(m) - gs.e0 <= tol) ++m;
    gs.multiplicity = static_cast<int>(m);
    gs.states = d.eigenvectors.leftCols(m);
    return gs;
}

double expectation(const OperatorMatrix& a, const StateVector& psi) {
    if (a.rows() != a.cols()) throw ValidationError("expectation: operator must be square");
    if (psi.size() != a.rows()) throw ValidationError("expectation: dimension mismatch");
    const double nrm2 = psi.squaredNorm();
    if (nrm2 <= 0.0 || !std::isfinite(nrm2))
        throw ValidationError("expectation: zero or non-finite state");
    const Complex z = psi.dot(a * psi) / nrm2;
    if (std::abs(z.imag()) > 1e-10 * std::max(1.0, std::abs(z))) {
        std::ostringstream msg;
        msg << "expectation: imaginary residue " << z.imag()
            << " beyond tolerance (non-Hermitian operator or broken state?)";
        throw NumericalError(msg.str());
    }
    return z.real();
}

double spectral_gap(const SpectralDecomposition& d) {
    if (d.dim() < 2) throw ValidationError("spectral_gap: needs dim >= 2");
    return std::max(0.0, d.eigenvalues(1) - d.eigenvalues(0));
}

}  // namespace qcurv
