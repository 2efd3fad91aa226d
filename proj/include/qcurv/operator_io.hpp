#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qcurv/operators.hpp"

namespace qcurv {

// operator-JSON: {"dim": d, "entries": [[[re,im], ...], ...]} row-major.
nlohmann::json operator_to_json(const OperatorMatrix& a);
OperatorMatrix operator_from_json(const nlohmann::json& j);

// pair-JSON: {"h1": operator-JSON, "h2": operator-JSON, "label1": str, "label2": str}
nlohmann::json pair_to_json(const OperatorPair& pair);
OperatorPair pair_from_json(const nlohmann::json& j);

// family-JSON: {"ops": [operator-JSON, ...]}
nlohmann::json family_to_json(const std::vector<OperatorMatrix>& ops);
std::vector<OperatorMatrix> family_from_json(const nlohmann::json& j);

/// Parses text as JSON, mapping parse failures to ValidationError.
nlohmann::json parse_json_text(const std::string& text, const std::string& what);

}  // namespace qcurv
