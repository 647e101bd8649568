#include "ecoimpact/analysis.hpp"

namespace ecoimpact {

Analysis::Analysis(EcosystemSnapshot snapshot, AnalysisConfig config)
    : snapshot_(std::move(snapshot)), config_(config), hash_(ecoimpact::snapshot_hash(snapshot_)) {
  graph_ = build_graph(snapshot_);
  ReachOptions reach_options;
  reach_options.threads = config_.threads;
  reach_ = reach_counts(graph_, reach_options);
  if (graph_.node_count() > 0) pagerank_ = ecoimpact::pagerank(graph_, config_.pagerank);
  improvement_ = normalize(impact(snapshot_, reach_, improvement_scenario(snapshot_)));
  regression_ = normalize(impact(snapshot_, reach_, regression_scenario(snapshot_)));
  improvement_selection_ = select_to_threshold(improvement_, config_.tau);
  regression_selection_ = select_to_threshold(regression_, config_.tau);
  union_ = union_selection(improvement_selection_, regression_selection_);
}

SupportSet Analysis::impact_support_set() const {
  return SupportSet{std::string(kImpactDrivenLabel), union_, SetSource::ImpactSelection, {}};
}

StrategyEvaluation Analysis::impact_row() const { return evaluate_support_set(impact_support_set(), context()); }

std::vector<BaselineResult> Analysis::baselines() const {
  BaselineOptions options;
  options.n_trials = config_.n_trials;
  options.seed = config_.seed;
  options.threads = config_.threads;
  return {random_baseline(improvement_, union_, options), random_baseline(regression_, union_, options)};
}

ComparisonReport Analysis::compare_with_pagerank() const {
  return budget_matched_compare({improvement_, regression_}, pagerank_, union_);
}

}  // namespace ecoimpact
