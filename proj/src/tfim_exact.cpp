#include "qcurv/tfim_exact.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qcurv/errors.hpp"
#include "qcurv/quadrature.hpp"

namespace qcurv {

namespace {

void require_positive_g(double g, const char* what) {
    if (!(g > 0.0) || !std::isfinite(g)) {
        std::ostringstream msg;
        msg << what << ": coupling must be positive and finite, got " << g;
        throw ValidationError(msg.str());
    }
}

}  // namespace

double magnetization(double g, double abs_tol) {
    require_positive_g(g, "magnetization");
    // Stable form of the integrand: with c = cos(k/2),
    //   1 + g cos k        = (1 - g) + 2 g c^2
    //   1 + g^2 + 2 g cos k = (1 - g)^2 + 4 g c^2
    // which avoids cancellation at the k = pi endpoint as g -> 1 (there the
    // integrand reduces to cos(k/2), an integrable sqrt-type vertex).
    const double one_minus_g = 1.0 - g;
    auto integrand = [g, one_minus_g](double k) {
        const double c = std::cos(0.5 * k);
        const double c2 = c * c;
        return (one_minus_g + 2.0 * g * c2) /
               std::sqrt(one_minus_g * one_minus_g + 4.0 * g * c2);
    };
    const auto r = integrate_adaptive(integrand, 0.0, std::numbers::pi, abs_tol);
    return r.value / std::numbers::pi;
}

std::pair<double, double> boundary_exact(double g) {
    require_positive_g(g, "boundary_exact");
    return {-magnetization(g), -magnetization(1.0 / g)};
}

double elliptic_K(double m) {
    if (!(m >= 0.0) || !(m < 1.0))
        throw ValidationError("elliptic_K: parameter must lie in [0, 1)");
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    while (a - b > 1e-16 * a) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return std::numbers::pi / (a + b);
}

double elliptic_E(double m) {
    if (!(m >= 0.0) || !(m <= 1.0))
        throw ValidationError("elliptic_E: parameter must lie in [0, 1]");
    if (m == 1.0) return 1.0;
    // AGM with the c_n^2 sum: E = K (1 - sum_{n>=0} 2^{n-1} c_n^2), c_0^2 = m.
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double csum = 0.5 * m;
    double pow2 = 1.0;
    while (a - b > 1e-16 * a) {
        const double c = 0.5 * (a - b);
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        csum += pow2 * c * c;
        pow2 *= 2.0;
    }
    const double k_complete = std::numbers::pi / (a + b);
    return k_complete * (1.0 - csum);
}

double curvature_exact(double g) {
    require_positive_g(g, "curvature_exact");
    if (g == 1.0) return 0.0;  // K(1) divergence limit
    // x = 4g/(1+g)^2 = 1 - ((1-g)/(1+g))^2, kept strictly below 1.
    const double u = (1.0 - g) / (1.0 + g);
    const double x = 1.0 - u * u;
    if (!(x < 1.0)) return 0.0;  // u underflowed: indistinguishable from g = 1
    const double K = elliptic_K(x);
    const double E = elliptic_E(x);
    const double g2p1 = g * g + 1.0;
    const double gp1 = g + 1.0;
    const double denom = std::pow(g2p1, 1.5) * (g2p1 * K - gp1 * gp1 * E);
    return std::numbers::pi * g * g * gp1 / denom;
}

}  // namespace qcurv
