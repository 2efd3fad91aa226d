#pragma once

#include <utility>

namespace qcurv {

/// Thermodynamic-limit magnetization integral
///   m(g) = (1/pi) int_0^pi (1 + g cos k) / sqrt(1 + g^2 + 2 g cos k) dk,
/// evaluated adaptively to abs_tol (default well under the 1e-10 contract).
/// m(0+) = 1, m(1) = 2/pi, m(g) ~ 1/(2g) for large g.
double magnetization(double g, double abs_tol = 1e-12);

/// Exact boundary point (h1, h2) = (-m(g), -m(1/g)).
///
/// The assignment of m(g) vs m(1/g) to the two axes is calibrated once
/// against L = 12 exact diagonalization (see tests): h2 = <H2> is the
/// transverse magnetization, which vanishes as g -> 0+ and approaches -1
/// as g -> infinity, i.e. h2 = -m(1/g).
std::pair<double, double> boundary_exact(double g);

/// Complete elliptic integrals in the parameter convention (m = k^2),
/// by arithmetic-geometric mean; relative error ~1e-15.
/// K is defined on [0, 1) and diverges at 1; E on [0, 1] with E(1) = 1.
double elliptic_K(double m);
double elliptic_E(double m);

/// Closed-form boundary curvature
///   kappa(g) = pi g^2 (g+1) /
///     ((g^2+1)^{3/2} ((g^2+1) K(x) - (g+1)^2 E(x))),  x = 4g/(1+g)^2.
/// Self-dual (kappa(g) = kappa(1/g)), positive for g != 1, and 0 at the
/// critical point g = 1 (K(x) diverges; the limit branch returns 0).
double curvature_exact(double g);

}  // namespace qcurv
