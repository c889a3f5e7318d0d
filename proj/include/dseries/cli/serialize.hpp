#pragma once

#include <json.hpp>

#include "dseries/cfrac.hpp"
#include "dseries/criterion.hpp"
#include "dseries/sumengine.hpp"

namespace dseries::cli {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const Convergent& c);
nlohmann::json to_json(const Expansion& e);
nlohmann::json to_json(const CriterionTerm& t);
nlohmann::json to_json(const CriterionSum& s);
nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const PartialSumResult& r);
nlohmann::json to_json(const DriftPrediction& d);

/// Decimal with 17 significant digits, as used in CSV traces.
std::string format_g17(double x);

}  // namespace dseries::cli
