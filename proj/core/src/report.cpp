#include "reidtk/report.hpp"

#include "reidtk/error.hpp"

namespace reidtk::report {

nlohmann::json to_json(const evalkit::EvalReport& r, const nlohmann::json& config) {
  return {
      {"cmc", r.cmc},
      {"mAP", r.mean_ap},
      {"valid_queries", r.valid_queries},
      {"excluded_queries", r.excluded_queries},
      {"config", config},
  };
}

evalkit::EvalReport from_json(const nlohmann::json& j) {
  evalkit::EvalReport r;
  try {
    r.cmc = j.at("cmc").get<std::vector<double>>();
    r.mean_ap = j.at("mAP").get<double>();
    r.valid_queries = j.at("valid_queries").get<std::size_t>();
    r.excluded_queries = j.value("excluded_queries", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatError::Kind::kBadField, 0, std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace reidtk::report
