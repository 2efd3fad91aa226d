#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "qcurv/errors.hpp"

namespace qcurv {

using Complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Default guardrail: 2^14 = 16384 is the largest dense dimension we build.
inline constexpr int kDefaultSiteCap = 14;

double max_abs(const OperatorMatrix& a);

/// max_ij |A[i][j] - conj(A[j][i])|
double hermiticity_residual(const OperatorMatrix& a);

/// Hermitian within 1e-12 * (1 + max|A|), all entries finite.
bool is_hermitian(const OperatorMatrix& a);

/// Throws ValidationError (with the residual) if the invariant fails.
void require_hermitian(const OperatorMatrix& a, const std::string& what);

/// A product of single-site Paulis with a real coefficient.
struct PauliString {
    int sites = 0;
    std::string letters;  // length == sites, over {I, X, Y, Z}
    double coefficient = 1.0;
};

/// The two-operator pencil H(g) = h1 + g*h2.
struct OperatorPair {
    OperatorMatrix h1, h2;
    std::string label1, label2;
    int site_count = 1;
    bool normalized_per_site = false;

    Eigen::Index dim() const { return h1.rows(); }
};

/// Checks dims, Hermiticity, and linear independence of the two operators.
void validate_pair(const OperatorPair& pair);

/// coefficient * (sigma_1 (x) ... (x) sigma_n); site 0 is the leftmost
/// (most significant) factor. dim = 2^sites.
OperatorMatrix pauli_string_to_matrix(const PauliString& ps, int site_cap = kDefaultSiteCap);

/// Accumulates a Pauli string into an existing 2^n x 2^n matrix.
void add_pauli_string(OperatorMatrix& acc, const PauliString& ps);

/// h1 = -(1/L) sum_i Z_i Z_{i+1} (L bonds when periodic, L-1 open),
/// h2 = -(1/L) sum_i X_i.
OperatorPair build_tfim(int sites, bool periodic, int site_cap = kDefaultSiteCap);

/// Toric code on an lx x ly torus, one qubit per edge (N_e = 2*lx*ly).
/// h1 = -(1/N_e)(sum_v A_v + sum_p B_p), h2 = -(1/N_e) sum_e Z_e.
///
/// Index conventions (deterministic): vertices (x, y) are row-major,
/// x in [0, lx), y in [0, ly). Each vertex owns two edges,
///   edge(x, y, 0): horizontal (east) edge, index 2*(y*lx + x)
///   edge(x, y, 1): vertical (south) edge,  index 2*(y*lx + x) + 1
/// A_v at (x, y) acts X on its east/south edges plus the east edge of
/// (x-1, y) and the south edge of (x, y-1). The plaquette at (x, y) has
/// the east edges of (x, y) and (x, y+1) and the south edges of (x, y)
/// and (x+1, y); B_p acts Z on those four.
OperatorPair build_toric_code(int lx, int ly, int site_cap = kDefaultSiteCap);

/// Max entry magnitude of AB - BA.
double commutator_norm(const OperatorMatrix& a, const OperatorMatrix& b);

/// GUE-style A = (G + G^dag)/2 with G ~ iid standard normal real and
/// imaginary parts; deterministic for a fixed seed.
OperatorMatrix random_hermitian(int dim, std::uint64_t seed);

/// Random normalized state, deterministic for a fixed seed.
StateVector random_state(int dim, std::uint64_t seed);

}  // namespace qcurv
