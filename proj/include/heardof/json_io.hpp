#pragma once

// Canonical JSON and trace-text forms. Everything is emitted in sorted
// order so identical inputs produce byte-identical output.

#include <string>

#include <json.hpp>

#include "heardof/analysis.hpp"
#include "heardof/execution.hpp"
#include "heardof/predicate.hpp"
#include "heardof/strategy.hpp"

namespace heardof {

nlohmann::json collection_to_json(const Collection& c);
Collection collection_from_json(const nlohmann::json& j);

nlohmann::json predicate_to_json(const Predicate& p);
Predicate predicate_from_json(const nlohmann::json& j);

nlohmann::json strategy_to_json(const Strategy& f);
Strategy strategy_from_json(const nlohmann::json& j);

nlohmann::json ho_predicate_to_json(const HeardOfPredicate& p);
HeardOfPredicate ho_predicate_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const TheoremReport& r);

// One event per line: "D r k j", "N j", "S".
std::string trace_to_text(const Execution& t);
Execution trace_from_text(const std::string& text, int n, int horizon);
nlohmann::json trace_to_json(const Execution& t);

}  // namespace heardof
