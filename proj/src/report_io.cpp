#include "qcurv/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qcurv {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

const char* bool_text(bool b) { return b ? "true" : "false"; }

double parse_double(std::string_view field, const char* what) {
    double value = 0.0;
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ValidationError(std::string("CSV: bad numeric field for ") + what);
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::string boundary_curve_csv(const BoundaryCurve& curve, const std::string& config_echo) {
    std::ostringstream out;
    if (!config_echo.empty()) out << "# " << config_echo << "\n";
    out << "g,lambda1,lambda2,h1,h2,e0,gap,kappa_spectral,kappa_fd,degenerate\n";
    const auto& pts = curve.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        out << format_double(p.g) << ',' << format_double(p.lambda1) << ','
            << format_double(p.lambda2) << ',' << format_double(p.h1) << ','
            << format_double(p.h2) << ',' << format_double(p.e0) << ','
            << format_double(p.gap) << ',';
        if (!std::isnan(p.kappa_spectral)) out << format_double(p.kappa_spectral);
        out << ',';
        if (i >= 1 && i + 1 < pts.size() && !pts[i - 1].degenerate && !p.degenerate &&
            !pts[i + 1].degenerate) {
            out << format_double(curvature_finite_difference(curve, i));
        }
        out << ',' << bool_text(p.degenerate) << "\n";
    }
    return out.str();
}

BoundaryCurve boundary_curve_from_csv(const std::string& text) {
    BoundaryCurve curve;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "g,lambda1,lambda2,h1,h2,e0,gap,kappa_spectral,kappa_fd,degenerate")
                throw ValidationError("boundary CSV: unexpected header: " + line);
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 10) throw ValidationError("boundary CSV: expected 10 fields");
        BoundaryPoint p;
        p.g = parse_double(fields[0], "g");
        p.lambda1 = parse_double(fields[1], "lambda1");
        p.lambda2 = parse_double(fields[2], "lambda2");
        p.h1 = parse_double(fields[3], "h1");
        p.h2 = parse_double(fields[4], "h2");
        p.e0 = parse_double(fields[5], "e0");
        p.gap = parse_double(fields[6], "gap");
        p.kappa_spectral = fields[7].empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : parse_double(fields[7], "kappa_spectral");
        // fields[8] (kappa_fd) is derived; not stored on the point
        if (fields[9] == "true") p.degenerate = true;
        else if (fields[9] == "false") p.degenerate = false;
        else throw ValidationError("boundary CSV: degenerate must be true/false");
        curve.points.push_back(p);
    }
    if (!header_seen) throw ValidationError("boundary CSV: missing header");
    return curve;
}

std::string exact_curve_csv(const std::vector<ExactRow>& rows, const std::string& config_echo) {
    std::ostringstream out;
    if (!config_echo.empty()) out << "# " << config_echo << "\n";
    out << "g,m,h1,h2,kappa\n";
    for (const auto& r : rows)
        out << format_double(r.g) << ',' << format_double(r.m) << ',' << format_double(r.h1)
            << ',' << format_double(r.h2) << ',' << format_double(r.kappa) << "\n";
    return out.str();
}

std::string branches_csv(const std::vector<BranchCurve>& branches,
                         const std::string& config_echo) {
    std::ostringstream out;
    if (!config_echo.empty()) out << "# " << config_echo << "\n";
    out << "k,g,h1,h2,energy\n";
    for (const auto& branch : branches)
        for (const auto& p : branch.points)
            out << branch.index << ',' << format_double(p.g) << ',' << format_double(p.h1)
                << ',' << format_double(p.h2) << ',' << format_double(p.energy) << "\n";
    return out.str();
}

nlohmann::json transition_report_json(const TransitionReport& report,
                                      const std::string& config_echo) {
    nlohmann::json j{{"kind", to_string(report.kind)},
                     {"kappa_min", report.kappa_min},
                     {"gap_min", report.gap_min},
                     {"delta_h1", report.delta_h1},
                     {"delta_h2", report.delta_h2}};
    // JSON has no NaN/inf literals; emit them as strings.
    if (std::isfinite(report.g_star)) j["g_star"] = report.g_star;
    else j["g_star"] = format_double(report.g_star);
    if (!std::isfinite(report.kappa_min)) j["kappa_min"] = format_double(report.kappa_min);
    if (!config_echo.empty()) j["config"] = config_echo;
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw ValidationError("error while reading file: " + path);
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open file for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw ValidationError("error while writing file: " + path);
}

}  // namespace qcurv
