#include "qcurv/operator_io.hpp"

#include <cmath>
#include <sstream>

namespace qcurv {

using nlohmann::json;

json operator_to_json(const OperatorMatrix& a) {
    require_hermitian(a, "operator_to_json");
    const Eigen::Index d = a.rows();
    json entries = json::array();
    for (Eigen::Index i = 0; i < d; ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < d; ++j)
            row.push_back({a(i, j).real(), a(i, j).imag()});
        entries.push_back(std::move(row));
    }
    return json{{"dim", d}, {"entries", std::move(entries)}};
}

OperatorMatrix operator_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
        throw ValidationError("operator-JSON: expected object with 'dim' and 'entries'");
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1)
        throw ValidationError("operator-JSON: 'dim' must be a positive integer");
    const Eigen::Index d = j["dim"].get<Eigen::Index>();
    const json& entries = j["entries"];
    if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != d)
        throw ValidationError("operator-JSON: 'entries' must have dim rows");
    OperatorMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const json& row = entries[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
            throw ValidationError("operator-JSON: each row must have dim entries");
        for (Eigen::Index k = 0; k < d; ++k) {
            const json& cell = row[static_cast<std::size_t>(k)];
            if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number())
                throw ValidationError("operator-JSON: entries must be [re, im] number pairs");
            const double re = cell[0].get<double>();
            const double im = cell[1].get<double>();
            if (!std::isfinite(re) || !std::isfinite(im))
                throw ValidationError("operator-JSON: entries must be finite");
            a(i, k) = Complex(re, im);
        }
    }
    const double res = hermiticity_residual(a);
    const double tol = 1e-12 * (1.0 + max_abs(a));
    if (res > tol) {
        std::ostringstream msg;
        msg << "operator-JSON: payload is not Hermitian (residual " << res
            << ", tolerance " << tol << ")";
        throw ValidationError(msg.str());
    }
    return a;
}

json pair_to_json(const OperatorPair& pair) {
    return json{{"h1", operator_to_json(pair.h1)},
                {"h2", operator_to_json(pair.h2)},
                {"label1", pair.label1},
                {"label2", pair.label2}};
}

OperatorPair pair_from_json(const json& j) {
    if (!j.is_object() || !j.contains("h1") || !j.contains("h2"))
        throw ValidationError("pair-JSON: expected object with 'h1' and 'h2'");
    OperatorPair pair;
    pair.h1 = operator_from_json(j["h1"]);
    pair.h2 = operator_from_json(j["h2"]);
    pair.label1 = j.value("label1", std::string("H1"));
    pair.label2 = j.value("label2", std::string("H2"));
    pair.site_count = 1;
    pair.normalized_per_site = false;
    validate_pair(pair);
    return pair;
}

json family_to_json(const std::vector<OperatorMatrix>& ops) {
    json arr = json::array();
    for (const auto& op : ops) arr.push_back(operator_to_json(op));
    return json{{"ops", std::move(arr)}};
}

std::vector<OperatorMatrix> family_from_json(const json& j) {
    if (!j.is_object() || !j.contains("ops") || !j["ops"].is_array() || j["ops"].empty())
        throw ValidationError("family-JSON: expected object with non-empty 'ops' array");
    std::vector<OperatorMatrix> ops;
    ops.reserve(j["ops"].size());
    for (const auto& item : j["ops"]) ops.push_back(operator_from_json(item));
    for (std::size_t i = 1; i < ops.size(); ++i)
        if (ops[i].rows() != ops[0].rows())
            throw ValidationError("family-JSON: operators have mismatched dimensions");
    return ops;
}

json parse_json_text(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ValidationError(what + ": malformed JSON");
    return j;
}

}  // namespace qcurv
