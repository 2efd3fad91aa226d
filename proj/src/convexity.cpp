#include "qcurv/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcurv/spectra.hpp"

namespace qcurv {

namespace {

void require_normalized(const StateVector& psi, const char* name) {
    if (std::abs(psi.norm() - 1.0) > 1e-12)
        throw ValidationError(std::string(name) + ": state must be normalized within 1e-12");
}

double point_segment_distance(double px, double py, double ax, double ay, double bx,
                              double by) {
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0);
    return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

}  // namespace

InterpolationCase make_interpolation_case(const OperatorPair& pair, const StateVector& psi1,
                                          const StateVector& psi2) {
    validate_pair(pair);
    if (psi1.size() != pair.dim() || psi2.size() != pair.dim())
        throw ValidationError("interpolation: state dimension mismatch");
    require_normalized(psi1, "psi1");
    require_normalized(psi2, "psi2");

    InterpolationCase icase;
    icase.psi1 = psi1;
    icase.psi2 = psi2;
    icase.x1 = expectation(pair.h1, psi1);
    icase.y1 = expectation(pair.h2, psi1);
    icase.x2 = expectation(pair.h1, psi2);
    icase.y2 = expectation(pair.h2, psi2);

    const Complex x12 = psi1.dot(pair.h1 * psi2);
    const Complex y12 = psi1.dot(pair.h2 * psi2);
    const Complex n12 = psi1.dot(psi2);
    const double dx = icase.x2 - icase.x1;
    const double dy = icase.y2 - icase.y1;
    const double dn = icase.y2 * icase.x1 - icase.x2 * icase.y1;

    const Complex arg = x12 * dy - y12 * dx - n12 * dn;
    const double scale =
        std::abs(x12) * std::abs(dy) + std::abs(y12) * std::abs(dx) + std::abs(n12) * std::abs(dn);
    if (std::abs(arg) <= 1e-12 * (1.0 + scale)) {
        icase.theta = 0.0;
        icase.degenerate_phase = true;
        return icase;
    }
    // The cross term of the path's segment condition is Re(e^{i theta} arg);
    // theta = pi/2 - arg() makes it purely imaginary.
    double theta = 0.5 * std::numbers::pi - std::arg(arg);
    const double two_pi = 2.0 * std::numbers::pi;
    theta = std::fmod(theta, two_pi);
    if (theta < 0.0) theta += two_pi;
    icase.theta = theta;
    return icase;
}

StateVector interpolate(const StateVector& psi1, const StateVector& psi2, double theta,
                        double p) {
    if (psi1.size() != psi2.size()) throw ValidationError("interpolate: dimension mismatch");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("interpolate: p must lie in [0, 1]");
    const Complex phase = std::polar(1.0, theta);
    return std::sqrt(p) * psi1 + std::sqrt(1.0 - p) * phase * psi2;
}

double segment_deviation(const InterpolationCase& icase, const OperatorPair& pair,
                         int n_samples) {
    if (n_samples < 3) throw ValidationError("segment_deviation: needs at least 3 samples");
    double max_dev = 0.0;
    for (int j = 0; j < n_samples; ++j) {
        const double p = static_cast<double>(j) / (n_samples - 1);
        const StateVector psi = interpolate(icase.psi1, icase.psi2, icase.theta, p);
        if (psi.squaredNorm() < 1e-12) continue;  // psi2 ~ -psi1 at the midpoint
        const double x = expectation(pair.h1, psi);
        const double y = expectation(pair.h2, psi);
        max_dev = std::max(max_dev, point_segment_distance(x, y, icase.x1, icase.y1, icase.x2,
                                                           icase.y2));
    }
    return max_dev;
}

}  // namespace qcurv
