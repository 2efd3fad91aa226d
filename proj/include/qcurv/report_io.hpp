#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qcurv/moduli.hpp"

namespace qcurv {

/// Shortest round-trip decimal for a double ("inf"/"nan" spelled out).
std::string format_double(double v);

/// Boundary CSV: '#'-prefixed config echo, then the exact header
///   g,lambda1,lambda2,h1,h2,e0,gap,kappa_spectral,kappa_fd,degenerate
/// kappa_fd comes from curvature_finite_difference at interior indices;
/// undefined curvatures serialize as empty fields.
std::string boundary_curve_csv(const BoundaryCurve& curve, const std::string& config_echo);

/// Parses the format written by boundary_curve_csv.
BoundaryCurve boundary_curve_from_csv(const std::string& text);

/// Exact-solution CSV: header g,m,h1,h2,kappa.
struct ExactRow {
    double g, m, h1, h2, kappa;
};
std::string exact_curve_csv(const std::vector<ExactRow>& rows, const std::string& config_echo);

/// Branch CSV: header k,g,h1,h2,energy.
std::string branches_csv(const std::vector<BranchCurve>& branches,
                         const std::string& config_echo);

nlohmann::json transition_report_json(const TransitionReport& report,
                                      const std::string& config_echo);

/// Reads a whole file; throws ValidationError on failure.
std::string read_text_file(const std::string& path);
/// Writes a whole file; throws ValidationError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qcurv
