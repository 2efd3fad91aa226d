#pragma once

#include "qcurv/operators.hpp"

namespace qcurv {

/// A phase-adjusted interpolation between two normalized states, with the
/// planar expectation endpoints it connects.
struct InterpolationCase {
    StateVector psi1, psi2;
    double theta = 0.0;
    bool degenerate_phase = false;  // the phase argument vanished; any theta works
    double x1 = 0.0, y1 = 0.0;      // (<H1>, <H2>) of psi1
    double x2 = 0.0, y2 = 0.0;      // of psi2
};

/// Phase making the expectation path of interpolate() trace the straight
/// segment between the endpoints:
///   theta = pi/2 - arg(x12 dy - y12 dx - n12 dn)  in [0, 2pi),
/// with x12 = <psi1|H1|psi2>, y12 = <psi1|H2|psi2>, n12 = <psi1|psi2>,
/// dx = x2-x1, dy = y2-y1, dn = y2 x1 - x2 y1. When the argument vanishes
/// every phase gives a segment; theta = 0 is returned with the flag set.
InterpolationCase make_interpolation_case(const OperatorPair& pair, const StateVector& psi1,
                                          const StateVector& psi2);

/// sqrt(p) psi1 + sqrt(1-p) e^{i theta} psi2, not renormalized
/// (expectations use the ratio form, well-defined on rays).
StateVector interpolate(const StateVector& psi1, const StateVector& psi2, double theta,
                        double p);

/// Max Euclidean distance of the expectation path from the endpoint segment
/// over n_samples uniform p values in [0, 1].
double segment_deviation(const InterpolationCase& icase, const OperatorPair& pair,
                         int n_samples);

}  // namespace qcurv
