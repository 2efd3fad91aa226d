#include "qcurv/operators.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace qcurv {

double max_abs(const OperatorMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const OperatorMatrix& a) {
    return max_abs(a - a.adjoint());
}

bool is_hermitian(const OperatorMatrix& a) {
    if (a.rows() != a.cols() || a.rows() < 1) return false;
    if (!a.allFinite()) return false;
    return hermiticity_residual(a) <= 1e-12 * (1.0 + max_abs(a));
}

void require_hermitian(const OperatorMatrix& a, const std::string& what) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw ValidationError(what + ": matrix must be square and non-empty");
    if (!a.allFinite())
        throw ValidationError(what + ": matrix has non-finite entries");
    const double res = hermiticity_residual(a);
    const double tol = 1e-12 * (1.0 + max_abs(a));
    if (res > tol) {
        std::ostringstream msg;
        msg << what << ": not Hermitian, residual " << res << " exceeds " << tol;
        throw ValidationError(msg.str());
    }
}

void validate_pair(const OperatorPair& pair) {
    require_hermitian(pair.h1, "pair.h1");
    require_hermitian(pair.h2, "pair.h2");
    if (pair.h1.rows() != pair.h2.rows())
        throw ValidationError("pair: h1 and h2 have different dimensions");
    // Linear independence: neither operator is a scalar multiple of the other.
    const double s1 = max_abs(pair.h1);
    const double s2 = max_abs(pair.h2);
    if (s1 == 0.0 || s2 == 0.0)
        throw ValidationError("pair: operators are linearly dependent (one is zero)");
    Eigen::Index r = 0, c = 0;
    pair.h1.cwiseAbs().maxCoeff(&r, &c);
    const Complex ratio = pair.h2(r, c) / pair.h1(r, c);
    const double res = max_abs(pair.h2 - ratio * pair.h1);
    if (res <= 1e-10 * std::max(s2, std::abs(ratio) * s1))
        throw ValidationError("pair: h2 is a scalar multiple of h1 within 1e-10");
}

namespace {

void check_letters(const PauliString& ps) {
    if (ps.sites < 1) throw ValidationError("pauli string: sites must be positive");
    if (static_cast<int>(ps.letters.size()) != ps.sites)
        throw ValidationError("pauli string: letters length does not match sites");
    for (char ch : ps.letters)
        if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z')
            throw ValidationError(std::string("pauli string: bad letter '") + ch + "'");
    if (!std::isfinite(ps.coefficient))
        throw ValidationError("pauli string: coefficient must be finite");
}

}  // namespace

void add_pauli_string(OperatorMatrix& acc, const PauliString& ps) {
    check_letters(ps);
    const int n = ps.sites;
    const Eigen::Index dim = Eigen::Index(1) << n;
    if (acc.rows() != dim || acc.cols() != dim)
        throw ValidationError("add_pauli_string: accumulator dimension mismatch");

    // A Pauli string is a generalized permutation: column b has a single
    // nonzero at row b ^ flip_mask, with a phase of i^(power) * sign.
    std::uint64_t flip_mask = 0;
    for (int s = 0; s < n; ++s) {
        const char ch = ps.letters[s];
        if (ch == 'X' || ch == 'Y') flip_mask |= std::uint64_t(1) << (n - 1 - s);
    }
    for (std::uint64_t col = 0; col < std::uint64_t(dim); ++col) {
        Complex phase(ps.coefficient, 0.0);
        for (int s = 0; s < n; ++s) {
            const std::uint64_t bit = (col >> (n - 1 - s)) & 1u;  // 0 -> |0>, 1 -> |1>
            switch (ps.letters[s]) {
                case 'Y':
                    // Y|0> = i|1>, Y|1> = -i|0>
                    phase *= bit ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
                    break;
                case 'Z':
                    if (bit) phase = -phase;
                    break;
                default:
                    break;
            }
        }
        acc(static_cast<Eigen::Index>(col ^ flip_mask), static_cast<Eigen::Index>(col)) += phase;
    }
}

OperatorMatrix pauli_string_to_matrix(const PauliString& ps, int site_cap) {
    check_letters(ps);
    if (ps.sites > site_cap) {
        std::ostringstream msg;
        msg << "pauli string: " << ps.sites << " sites exceeds cap " << site_cap;
        throw DimensionLimitError(msg.str());
    }
    const Eigen::Index dim = Eigen::Index(1) << ps.sites;
    OperatorMatrix m = OperatorMatrix::Zero(dim, dim);
    add_pauli_string(m, ps);
    return m;
}

OperatorPair build_tfim(int sites, bool periodic, int site_cap) {
    if (sites < 2) throw ValidationError("tfim: needs at least 2 sites");
    if (sites > site_cap) {
        std::ostringstream msg;
        msg << "tfim: " << sites << " sites exceeds cap " << site_cap;
        throw DimensionLimitError(msg.str());
    }
    const int L = sites;
    const Eigen::Index dim = Eigen::Index(1) << L;
    const double coeff = -1.0 / L;

    OperatorMatrix h1 = OperatorMatrix::Zero(dim, dim);
    const int bonds = periodic ? L : L - 1;
    for (int i = 0; i < bonds; ++i) {
        std::string letters(L, 'I');
        letters[i] = 'Z';
        letters[(i + 1) % L] = 'Z';
        add_pauli_string(h1, {L, letters, coeff});
    }

    OperatorMatrix h2 = OperatorMatrix::Zero(dim, dim);
    for (int i = 0; i < L; ++i) {
        std::string letters(L, 'I');
        letters[i] = 'X';
        add_pauli_string(h2, {L, letters, coeff});
    }

    return {std::move(h1), std::move(h2), "-(1/L) sum Z_i Z_{i+1}", "-(1/L) sum X_i", L, true};
}

OperatorPair build_toric_code(int lx, int ly, int site_cap) {
    if (lx < 2 || ly < 2)
        throw ValidationError("toric code: torus must be at least 2x2");
    const int n_edges = 2 * lx * ly;
    if (n_edges > site_cap) {
        std::ostringstream msg;
        msg << "toric code: " << n_edges << " edges exceeds site cap " << site_cap;
        throw DimensionLimitError(msg.str());
    }
    const Eigen::Index dim = Eigen::Index(1) << n_edges;
    const double coeff = -1.0 / n_edges;

    auto edge = [lx](int x, int y, int orient) { return 2 * (y * lx + x) + orient; };
    auto wrap = [](int v, int m) { return ((v % m) + m) % m; };

    OperatorMatrix h1 = OperatorMatrix::Zero(dim, dim);
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            // Vertex star: X on the four incident edges.
            std::string av(n_edges, 'I');
            av[edge(x, y, 0)] = 'X';
            av[edge(wrap(x - 1, lx), y, 0)] = 'X';
            av[edge(x, y, 1)] = 'X';
            av[edge(x, wrap(y - 1, ly), 1)] = 'X';
            add_pauli_string(h1, {n_edges, av, coeff});

            // Plaquette: Z on the four bounding edges.
            std::string bp(n_edges, 'I');
            bp[edge(x, y, 0)] = 'Z';
            bp[edge(x, wrap(y + 1, ly), 0)] = 'Z';
            bp[edge(x, y, 1)] = 'Z';
            bp[edge(wrap(x + 1, lx), y, 1)] = 'Z';
            add_pauli_string(h1, {n_edges, bp, coeff});
        }
    }

    OperatorMatrix h2 = OperatorMatrix::Zero(dim, dim);
    for (int e = 0; e < n_edges; ++e) {
        std::string letters(n_edges, 'I');
        letters[e] = 'Z';
        add_pauli_string(h2, {n_edges, letters, coeff});
    }

    return {std::move(h1), std::move(h2), "-(1/N_e)(sum A_v + sum B_p)", "-(1/N_e) sum Z_e",
            n_edges, true};
}

double commutator_norm(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw ValidationError("commutator_norm: dimension mismatch");
    return max_abs(a * b - b * a);
}

OperatorMatrix random_hermitian(int dim, std::uint64_t seed) {
    if (dim < 1) throw ValidationError("random_hermitian: dim must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    OperatorMatrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    return 0.5 * (g + g.adjoint().eval());
}

StateVector random_state(int dim, std::uint64_t seed) {
    if (dim < 1) throw ValidationError("random_state: dim must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    StateVector psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        psi(i) = Complex(re, im);
    }
    const double nrm = psi.norm();
    if (nrm == 0.0) psi(0) = 1.0;  // astronomically unlikely
    else psi /= nrm;
    return psi;
}

}  // namespace qcurv
