#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ecoimpact/graph.hpp"
#include "ecoimpact/snapshot.hpp"

namespace ecoimpact {

inline constexpr double kMinScore = 0.0;
inline constexpr double kMaxScore = 10.0;

/// Per-package maintenance deltas (score after minus score before).
/// Packages absent from `deltas` are unchanged.
struct Scenario {
  std::string label;
  std::map<std::string, double> deltas;
};

Scenario improvement_scenario(const EcosystemSnapshot& snapshot);
Scenario regression_scenario(const EcosystemSnapshot& snapshot);

/// Same presets restricted to `members`; unscored members are skipped.
Scenario improvement_scenario(const EcosystemSnapshot& snapshot, const std::set<std::string>& members);
Scenario regression_scenario(const EcosystemSnapshot& snapshot, const std::set<std::string>& members);

struct EcosystemState {
  double value = 0.0;
  std::vector<std::string> excluded;  // packages without a score
};

/// Sum over packages of reach * score. `scores` may omit packages; those
/// contribute nothing and are listed as excluded.
EcosystemState ecosystem_state(const ReachTable& reach, const std::map<std::string, double>& scores);
EcosystemState ecosystem_state(const EcosystemSnapshot& snapshot, const ReachTable& reach);

std::map<std::string, double> snapshot_scores(const EcosystemSnapshot& snapshot);

/// Per-package impact of one scenario. All vectors are indexed by node id
/// (lexicographic package order).
struct ImpactReport {
  std::string label;
  std::vector<std::string> names;
  std::vector<std::uint64_t> reach;
  std::vector<double> delta;
  std::vector<double> raw_impact;
  std::vector<char> scored;
  /// Scored packages by descending share; equal shares by name.
  std::vector<NodeId> ranking;
  /// Compensated sum of raw_impact taken in ranking order.
  double total = 0.0;
  std::vector<std::string> excluded;
  std::vector<double> normalized;  // empty until normalize()

  bool is_normalized() const noexcept { return !normalized.empty() || names.empty(); }
  double share(const std::string& name) const;
};

ImpactReport impact(const EcosystemSnapshot& snapshot, const ReachTable& reach, const Scenario& scenario);

/// Divides each impact by the scenario total. Throws DegenerateScenario
/// when the total is zero.
ImpactReport normalize(ImpactReport report);

struct RankedEntry {
  std::string package;
  double share = 0.0;
  double cumulative = 0.0;
};

struct SelectionOptions {
  std::set<std::string> pinned;
  std::set<std::string> excluded;
};

struct SelectionResult {
  std::string label;
  double tau = 0.0;
  std::vector<RankedEntry> ranked;  // selection order, pinned first
  std::size_t selected_count = 0;
  double achieved_share = 0.0;

  std::vector<std::string> selected() const;
};

/// Shortest prefix of the ranking whose cumulative share is >= tau.
/// Throws Domain for tau outside (0,1], Unreachable when no prefix reaches tau.
SelectionResult select_to_threshold(const ImpactReport& report, double tau, const SelectionOptions& options = {});

std::vector<std::string> union_selection(const SelectionResult& improvement, const SelectionResult& regression);

struct BaselineResult {
  std::string label;
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t set_size = 0;
  std::uint64_t population = 0;
  double observed_impact = 0.0;  // cumulative normalized share of the observed set
  double mean = 0.0;
  double std_dev = 0.0;
  bool std_is_zero = false;
  double z_score = 0.0;
  std::uint64_t at_least_observed = 0;
  double p_upper_bound = 0.0;

  /// "< 1/n_trials" when no trial reached the observed impact.
  std::string p_display() const;
  bool operator==(const BaselineResult&) const = default;
};

struct BaselineOptions {
  std::uint64_t n_trials = 10000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
};

/// Size-matched random baseline: each trial draws |observed| distinct scored
/// packages uniformly without replacement and sums their normalized shares.
BaselineResult random_baseline(const ImpactReport& report, const std::vector<std::string>& observed,
                               const BaselineOptions& options = {});

void write_impact_csv(const ImpactReport& report, std::ostream& out);
/// Selected prefix only.
void write_selection_csv(const SelectionResult& selection, std::ostream& out);

/// Shortest round-trip decimal form.
std::string format_real(double value);

}  // namespace ecoimpact
