#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>

#include "ecoimpact/error.hpp"
#include "ecoimpact/support.hpp"

namespace ecoimpact {

namespace {

double ratio(std::uint64_t count, std::uint64_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(whole);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

SupportSet make_support_set(std::string label, const std::vector<std::string>& names,
                            const EcosystemSnapshot& snapshot, SetSource source) {
  std::set<std::string> members, unresolved;
  for (const auto& raw : names) {
    std::string name;
    try {
      name = normalize_name(raw);
    } catch (const Error&) {
      unresolved.insert(raw);
      continue;
    }
    (snapshot.contains(name) ? members : unresolved).insert(name);
  }
  return SupportSet{std::move(label), {members.begin(), members.end()}, source, {unresolved.begin(), unresolved.end()}};
}

SupportSet load_external_set(const std::filesystem::path& path, const EcosystemSnapshot& snapshot,
                             std::optional<std::string> label) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto name = trim(line);
    if (name.empty() || name.front() == '#') continue;
    names.push_back(name);
  }
  if (in.bad()) throw Error(ErrorKind::Io, "read failed: " + path.string());
  return make_support_set(label.value_or(path.stem().string()), names, snapshot, SetSource::ExternalList);
}

MaintainerReach maintainer_reach(const SupportSet& set, const EcosystemSnapshot& snapshot) {
  MaintainerReach out;
  std::set<std::string> distinct;
  for (const auto& name : set.members) {
    const auto& owner = snapshot.at(name).repository_owner;
    if (!owner) {
      ++out.packages_without_owner;
      continue;
    }
    out.total_individuals += owner->member_ids.size();
    distinct.insert(owner->member_ids.begin(), owner->member_ids.end());
    if (owner->member_ids.size() == 1) ++out.single_maintainer_packages;
  }
  out.distinct_maintainers = distinct.size();
  return out;
}

double MetadataAccessibility::fraction(std::uint64_t count) const noexcept { return ratio(count, package_count); }

MetadataAccessibility metadata_accessibility(const SupportSet& set, const EcosystemSnapshot& snapshot) {
  MetadataAccessibility out;
  out.package_count = set.members.size();
  out.empty_set = set.members.empty();
  for (const auto& name : set.members) {
    const auto& p = snapshot.at(name);
    out.contact += p.has_contact_info;
    out.donation += p.has_donation_link;
    out.contact_and_donation += p.has_contact_info && p.has_donation_link;
    out.neither += !p.has_contact_info && !p.has_donation_link;
  }
  return out;
}

ExclusionReport exclusion_analysis(const SupportSet& set, const EcosystemSnapshot& snapshot, const ReachTable& reach,
                                   const ExclusionOptions& options) {
  ExclusionReport out;
  if (set.source == SetSource::ExternalList) {
    for (const auto& name : set.members) {
      if (!snapshot.at(name).has_repository_link) out.excluded.push_back({name, reach.at(name)});
    }
  } else {
    std::uint64_t frontier = UINT64_MAX;
    for (const auto& name : set.members) frontier = std::min(frontier, reach.at(name));
    if (options.reach_threshold) frontier = *options.reach_threshold;
    if (frontier == UINT64_MAX) return out;  // empty selection, no frontier
    out.reach_threshold = frontier;
    for (std::size_t i = 0; i < reach.size(); ++i) {
      const auto& name = reach.names[i];
      if (reach.reach[i] < frontier) continue;
      if (std::binary_search(set.members.begin(), set.members.end(), name)) continue;
      if (!snapshot.at(name).has_repository_link) out.excluded.push_back({name, reach.reach[i]});
    }
  }
  std::stable_sort(out.excluded.begin(), out.excluded.end(),
                   [](const ExclusionEntry& a, const ExclusionEntry& b) { return a.reach > b.reach; });
  return out;
}

double restricted_share(const EvaluationContext& context, Preset preset, const std::vector<std::string>& members) {
  const std::set<std::string> member_set(members.begin(), members.end());
  const bool improving = preset == Preset::Improvement;
  const ImpactReport& global = improving ? context.improvement : context.regression;
  const Scenario scenario = improving ? improvement_scenario(context.snapshot, member_set)
                                      : regression_scenario(context.snapshot, member_set);
  const ImpactReport restricted = impact(context.snapshot, context.reach, scenario);
  if (global.total == 0.0) throw Error(ErrorKind::DegenerateScenario, "global scenario total is zero");
  // + 0.0 turns a zero share under a negative total into +0
  return restricted.total / global.total + 0.0;
}

StrategyEvaluation evaluate_support_set(const SupportSet& set, const EvaluationContext& context,
                                        const ExclusionOptions& exclusion) {
  StrategyEvaluation row;
  row.label = set.label;
  row.source = set.source;
  row.package_count = set.members.size();
  row.ecosystem_fraction = ratio(row.package_count, context.snapshot.package_count());
  row.improvement_share = restricted_share(context, Preset::Improvement, set.members);
  row.regression_share = restricted_share(context, Preset::Regression, set.members);

  const auto reach = maintainer_reach(set, context.snapshot);
  row.total_individuals = reach.total_individuals;
  row.distinct_maintainers = reach.distinct_maintainers;
  row.single_maintainer_packages = reach.single_maintainer_packages;
  row.single_maintainer_fraction = ratio(reach.single_maintainer_packages, row.package_count);
  row.packages_without_owner = reach.packages_without_owner;

  const auto access = metadata_accessibility(set, context.snapshot);
  row.contact_count = access.contact;
  row.contact_fraction = access.fraction(access.contact);
  row.donation_count = access.donation;
  row.donation_fraction = access.fraction(access.donation);
  row.contact_and_donation_count = access.contact_and_donation;
  row.contact_and_donation_fraction = access.fraction(access.contact_and_donation);

  const auto excluded = exclusion_analysis(set, context.snapshot, context.reach, exclusion);
  row.excluded_no_repo = excluded.excluded.size();
  // Impact selections: excluded frontier packages relative to all candidates
  // at that reach level. External sets: relative to the set itself.
  row.excluded_no_repo_fraction = set.source == SetSource::ImpactSelection
                                      ? ratio(row.excluded_no_repo, row.package_count + row.excluded_no_repo)
                                      : ratio(row.excluded_no_repo, row.package_count);
  row.unresolved_count = set.unresolved.size();
  return row;
}

void write_strategies_csv(const std::vector<StrategyEvaluation>& rows, std::ostream& out) {
  out << "strategy,source,packages,ecosystem_fraction,improvement_share,regression_share,total_individuals,"
         "distinct_maintainers,single_maintainer_packages,single_maintainer_fraction,contact_info,"
         "contact_info_fraction,donation_link,donation_link_fraction,contact_and_donation,"
         "contact_and_donation_fraction,excluded_no_repo,excluded_no_repo_fraction,unresolved\n";
  for (const auto& r : rows) {
    out << csv_field(r.label) << ',' << (r.source == SetSource::ImpactSelection ? "impact-selection" : "external-list") << ','
        << r.package_count << ',' << format_real(r.ecosystem_fraction) << ',' << format_real(r.improvement_share) << ','
        << format_real(r.regression_share) << ',' << r.total_individuals << ',' << r.distinct_maintainers << ','
        << r.single_maintainer_packages << ',' << format_real(r.single_maintainer_fraction) << ',' << r.contact_count
        << ',' << format_real(r.contact_fraction) << ',' << r.donation_count << ',' << format_real(r.donation_fraction)
        << ',' << r.contact_and_donation_count << ',' << format_real(r.contact_and_donation_fraction) << ','
        << r.excluded_no_repo << ',' << format_real(r.excluded_no_repo_fraction) << ',' << r.unresolved_count << '\n';
  }
}

}  // namespace ecoimpact
