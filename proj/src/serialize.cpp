#include <algorithm>
#include <numeric>

#include "ecoimpact/serialize.hpp"

namespace ecoimpact {

using nlohmann::json;

namespace {

json optional_real(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void to_json(json& j, const RankedEntry& e) {
  j = json{{"package", e.package}, {"share", e.share}, {"cumulative", e.cumulative}};
}

void to_json(json& j, const SelectionResult& s) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.selected_count; ++i) {
    json row = s.ranked[i];
    row["rank"] = i + 1;
    rows.push_back(std::move(row));
  }
  j = json{{"label", s.label},
           {"tau", s.tau},
           {"achieved_share", s.achieved_share},
           {"selected_count", s.selected_count},
           {"selected", s.selected()},
           {"rows", std::move(rows)}};
}

json ranking_page(const SelectionResult& s, std::size_t offset, std::size_t limit) {
  json rows = json::array();
  const std::size_t begin = std::min(offset, s.ranked.size());
  const std::size_t end = begin + std::min(limit, s.ranked.size() - begin);
  for (std::size_t i = begin; i < end; ++i) {
    json row = s.ranked[i];
    row["rank"] = i + 1;
    row["selected"] = i < s.selected_count;
    rows.push_back(std::move(row));
  }
  return json{{"offset", offset}, {"limit", limit}, {"total", s.ranked.size()}, {"rows", std::move(rows)}};
}

void to_json(json& j, const BaselineResult& b) {
  j = json{{"label", b.label},
           {"n_trials", b.n_trials},
           {"seed", b.seed},
           {"set_size", b.set_size},
           {"population", b.population},
           {"observed_impact", b.observed_impact},
           {"mean", b.mean},
           {"std", b.std_dev},
           {"std_is_zero", b.std_is_zero},
           {"z_score", b.z_score},
           {"at_least_observed", b.at_least_observed},
           {"p_upper_bound", b.p_upper_bound},
           {"p", b.p_display()}};
}

void to_json(json& j, const StrategyEvaluation& e) {
  j = json{{"strategy", e.label},
           {"source", e.source == SetSource::ImpactSelection ? "impact-selection" : "external-list"},
           {"packages", e.package_count},
           {"ecosystem_fraction", e.ecosystem_fraction},
           {"improvement_share", e.improvement_share},
           {"regression_share", e.regression_share},
           {"total_individuals", e.total_individuals},
           {"distinct_maintainers", e.distinct_maintainers},
           {"single_maintainer_packages", e.single_maintainer_packages},
           {"single_maintainer_fraction", e.single_maintainer_fraction},
           {"packages_without_owner", e.packages_without_owner},
           {"contact_info", e.contact_count},
           {"contact_info_fraction", e.contact_fraction},
           {"donation_link", e.donation_count},
           {"donation_link_fraction", e.donation_fraction},
           {"contact_and_donation", e.contact_and_donation_count},
           {"contact_and_donation_fraction", e.contact_and_donation_fraction},
           {"excluded_no_repo", e.excluded_no_repo},
           {"excluded_no_repo_fraction", e.excluded_no_repo_fraction},
           {"unresolved", e.unresolved_count}};
}

void to_json(json& j, const ComparisonReport& c) {
  json scenarios = json::array();
  for (const auto& s : c.scenarios) {
    scenarios.push_back(json{{"label", s.label},
                             {"impact_set_share", s.impact_set_share},
                             {"pagerank_set_share", s.pagerank_set_share},
                             {"spearman", optional_real(s.spearman)},
                             {"pearson", optional_real(s.pearson)}});
  }
  j = json{{"k", c.k},
           {"jaccard", c.jaccard},
           {"impact_set", c.impact_set},
           {"pagerank_set", c.pagerank_set},
           {"only_in_impact", c.only_in_impact},
           {"only_in_pagerank", c.only_in_pagerank},
           {"correlated_packages", c.correlated_packages},
           {"uncorrelated_packages", c.uncorrelated_packages},
           {"scenarios", std::move(scenarios)}};
}

void to_json(json& j, const FilterStats& s) {
  j = json{{"raw_records", s.raw_records},
           {"unresolvable_records", s.unresolvable_records},
           {"raw_specifiers", s.raw_specifiers},
           {"unparseable_specifiers", s.unparseable_specifiers},
           {"unresolved_edges", s.unresolved_edges},
           {"edges_of_unresolvable_records", s.edges_of_unresolvable_records},
           {"optional_edges_excluded", s.optional_edges_excluded},
           {"marker_edges_excluded", s.marker_edges_excluded},
           {"self_edges", s.self_edges},
           {"duplicate_edges", s.duplicate_edges}};
}

void to_json(json& j, const ImpactReport& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    rows.push_back(json{{"package", r.names[i]},
                        {"reach", r.reach[i]},
                        {"delta", r.delta[i]},
                        {"impact", r.raw_impact[i]},
                        {"share", r.normalized.empty() ? json(nullptr) : json(r.normalized[i])}});
  }
  j = json{{"label", r.label}, {"total", r.total}, {"excluded", r.excluded}, {"rows", std::move(rows)}};
}

json provenance(const Analysis& analysis) {
  const auto& c = analysis.config();
  return json{{"tool", "ecoimpact"},
              {"version", kToolVersion},
              {"snapshot_format", kSnapshotFormat},
              {"snapshot_hash", analysis.snapshot_hash()},
              {"config",
               {{"tau", c.tau},
                {"damping", c.pagerank.damping},
                {"tol", c.pagerank.tol},
                {"max_iter", c.pagerank.max_iter},
                {"trials", c.n_trials},
                {"seed", c.seed}}}};
}

json summary(const EcosystemSnapshot& snapshot, const ReachTable& reach, const std::string& hash, std::size_t top) {
  std::vector<std::size_t> order(reach.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return reach.reach[a] > reach.reach[b]; });
  json top_reach = json::array();
  for (std::size_t i = 0; i < std::min(top, order.size()); ++i) {
    top_reach.push_back(json{{"package", reach.names[order[i]]}, {"reach", reach.reach[order[i]]}});
  }
  return json{{"packages", snapshot.package_count()},
              {"edges", snapshot.edge_count()},
              {"scored_packages", snapshot.scored_count()},
              {"snapshot_hash", hash},
              {"filter_stats", snapshot.filter_stats()},
              {"top_reach", std::move(top_reach)}};
}

json package_detail(const Analysis& analysis, const std::string& name) {
  const auto& p = analysis.snapshot().at(name);
  json owner = nullptr;
  if (p.repository_owner) {
    owner = json{{"owner_id", p.repository_owner->owner_id},
                 {"kind", p.repository_owner->kind == OwnerKind::Individual ? "individual" : "organization"},
                 {"member_count", p.repository_owner->member_ids.size()}};
  }
  json scenarios = json::object();
  for (const auto* report : {&analysis.improvement(), &analysis.regression()}) {
    const auto i = analysis.graph().id(name);
    scenarios[report->label] = json{{"delta", report->delta[i]},
                                    {"impact", report->raw_impact[i]},
                                    {"share", report->normalized[i]}};
  }
  const auto deps = analysis.graph().forward()[analysis.graph().id(name)];
  const auto dependents = analysis.graph().reverse()[analysis.graph().id(name)];
  return json{{"name", p.name},
              {"raw_name", p.raw_name},
              {"maintained_score", optional_real(p.maintained_score)},
              {"has_repository_link", p.has_repository_link},
              {"has_contact_info", p.has_contact_info},
              {"has_donation_link", p.has_donation_link},
              {"repository_owner", owner},
              {"download_count", p.download_count ? json(*p.download_count) : json(nullptr)},
              {"direct_dependencies", deps.size()},
              {"direct_dependents", dependents.size()},
              {"reach", analysis.reach().at(name)},
              {"pagerank", analysis.pagerank().at(name)},
              {"scenarios", std::move(scenarios)}};
}

}  // namespace ecoimpact
