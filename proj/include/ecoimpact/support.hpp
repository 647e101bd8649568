#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ecoimpact/graph.hpp"
#include "ecoimpact/impact.hpp"
#include "ecoimpact/snapshot.hpp"

namespace ecoimpact {

enum class SetSource { ImpactSelection, ExternalList };

struct SupportSet {
  std::string label;
  std::vector<std::string> members;     // sorted, unique, all in the snapshot
  SetSource source = SetSource::ExternalList;
  std::vector<std::string> unresolved;  // names absent from the snapshot
};

/// Builds a set from arbitrary names: normalizes, deduplicates and splits
/// off names that do not resolve in the snapshot.
SupportSet make_support_set(std::string label, const std::vector<std::string>& names,
                            const EcosystemSnapshot& snapshot, SetSource source);

/// Newline-delimited package names; blank lines and '#' comments skipped.
/// The label defaults to the file stem.
SupportSet load_external_set(const std::filesystem::path& path, const EcosystemSnapshot& snapshot,
                             std::optional<std::string> label = std::nullopt);

struct MaintainerReach {
  std::uint64_t total_individuals = 0;
  std::uint64_t distinct_maintainers = 0;
  std::uint64_t single_maintainer_packages = 0;
  std::uint64_t packages_without_owner = 0;
};

MaintainerReach maintainer_reach(const SupportSet& set, const EcosystemSnapshot& snapshot);

struct MetadataAccessibility {
  std::uint64_t package_count = 0;
  std::uint64_t contact = 0;
  std::uint64_t donation = 0;
  std::uint64_t contact_and_donation = 0;
  std::uint64_t neither = 0;
  bool empty_set = false;

  /// count / package_count, 0 for an empty set.
  double fraction(std::uint64_t count) const noexcept;
};

MetadataAccessibility metadata_accessibility(const SupportSet& set, const EcosystemSnapshot& snapshot);

struct ExclusionEntry {
  std::string package;
  std::uint64_t reach = 0;
};

struct ExclusionReport {
  /// Reach frontier used for impact selections (0 for external sets).
  std::uint64_t reach_threshold = 0;
  std::vector<ExclusionEntry> excluded;  // sorted by descending reach, then name
};

struct ExclusionOptions {
  /// Overrides the default frontier (minimum reach within the selection).
  std::optional<std::uint64_t> reach_threshold;
};

/// Impact selections: non-member packages without a repository link whose
/// reach is at least the selection's minimum reach. External sets: members
/// without a repository link.
ExclusionReport exclusion_analysis(const SupportSet& set, const EcosystemSnapshot& snapshot, const ReachTable& reach,
                                   const ExclusionOptions& options = {});

/// Whole-ecosystem scenario reports that every strategy is normalized
/// against. Both reports must be normalized.
struct EvaluationContext {
  const EcosystemSnapshot& snapshot;
  const ReachTable& reach;
  const ImpactReport& improvement;
  const ImpactReport& regression;
};

struct StrategyEvaluation {
  std::string label;
  SetSource source = SetSource::ExternalList;
  std::uint64_t package_count = 0;
  double ecosystem_fraction = 0.0;
  double improvement_share = 0.0;
  double regression_share = 0.0;
  std::uint64_t total_individuals = 0;
  std::uint64_t distinct_maintainers = 0;
  std::uint64_t single_maintainer_packages = 0;
  double single_maintainer_fraction = 0.0;
  std::uint64_t packages_without_owner = 0;
  std::uint64_t contact_count = 0;
  double contact_fraction = 0.0;
  std::uint64_t donation_count = 0;
  double donation_fraction = 0.0;
  std::uint64_t contact_and_donation_count = 0;
  double contact_and_donation_fraction = 0.0;
  std::uint64_t excluded_no_repo = 0;
  double excluded_no_repo_fraction = 0.0;
  std::uint64_t unresolved_count = 0;

  bool operator==(const StrategyEvaluation&) const = default;
};

enum class Preset { Improvement, Regression };

/// Share of the whole-ecosystem total induced by applying the preset only
/// to `members`.
double restricted_share(const EvaluationContext& context, Preset preset, const std::vector<std::string>& members);

StrategyEvaluation evaluate_support_set(const SupportSet& set, const EvaluationContext& context,
                                        const ExclusionOptions& exclusion = {});

/// Column order follows the published strategy tables.
void write_strategies_csv(const std::vector<StrategyEvaluation>& rows, std::ostream& out);

}  // namespace ecoimpact
