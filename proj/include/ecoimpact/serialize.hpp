#pragma once

#include "ecoimpact/analysis.hpp"
#include "json.hpp"

namespace ecoimpact {

// JSON forms shared by the CLI outputs and the HTTP service, so both emit
// identical fields for identical inputs.

void to_json(nlohmann::json& j, const RankedEntry& e);
void to_json(nlohmann::json& j, const SelectionResult& s);
void to_json(nlohmann::json& j, const BaselineResult& b);
void to_json(nlohmann::json& j, const StrategyEvaluation& e);
void to_json(nlohmann::json& j, const ComparisonReport& c);
void to_json(nlohmann::json& j, const FilterStats& s);
void to_json(nlohmann::json& j, const ImpactReport& r);

/// Selection rows from `offset`, at most `limit` of them, with their ranks.
nlohmann::json ranking_page(const SelectionResult& s, std::size_t offset, std::size_t limit);

nlohmann::json provenance(const Analysis& analysis);

nlohmann::json summary(const EcosystemSnapshot& snapshot, const ReachTable& reach, const std::string& hash,
                       std::size_t top = 10);

nlohmann::json package_detail(const Analysis& analysis, const std::string& name);

}  // namespace ecoimpact
