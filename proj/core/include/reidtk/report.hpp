#pragma once

#include <nlohmann/json.hpp>

#include "reidtk/evalkit.hpp"

namespace reidtk::report {

/// {"cmc": [...], "mAP": x, "valid_queries": n, "excluded_queries": m,
///  "config": {...}}
nlohmann::json to_json(const evalkit::EvalReport& r, const nlohmann::json& config = nlohmann::json::object());

/// Inverse of to_json; the config object is ignored. Throws FormatError on a
/// missing or mistyped key.
evalkit::EvalReport from_json(const nlohmann::json& j);

}  // namespace reidtk::report
