#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecoimpact/centrality.hpp"
#include "ecoimpact/graph.hpp"
#include "ecoimpact/impact.hpp"
#include "ecoimpact/snapshot.hpp"
#include "ecoimpact/support.hpp"

namespace ecoimpact {

inline constexpr std::string_view kToolVersion = "0.3.0";

struct AnalysisConfig {
  double tau = 0.80;
  PageRankOptions pagerank;
  std::uint64_t n_trials = 10000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
};

/// Everything derived from one snapshot that the batch commands and the
/// service share. Construction throws DegenerateScenario when either preset
/// induces zero total impact.
class Analysis {
 public:
  Analysis(EcosystemSnapshot snapshot, AnalysisConfig config);

  Analysis(const Analysis&) = delete;
  Analysis& operator=(const Analysis&) = delete;

  const EcosystemSnapshot& snapshot() const noexcept { return snapshot_; }
  const std::string& snapshot_hash() const noexcept { return hash_; }
  const AnalysisConfig& config() const noexcept { return config_; }
  const DependencyGraph& graph() const noexcept { return graph_; }
  const ReachTable& reach() const noexcept { return reach_; }
  const PageRankScores& pagerank() const noexcept { return pagerank_; }
  const ImpactReport& improvement() const noexcept { return improvement_; }
  const ImpactReport& regression() const noexcept { return regression_; }
  const ImpactReport& report(Preset preset) const noexcept {
    return preset == Preset::Improvement ? improvement_ : regression_;
  }
  const SelectionResult& improvement_selection() const noexcept { return improvement_selection_; }
  const SelectionResult& regression_selection() const noexcept { return regression_selection_; }
  const std::vector<std::string>& union_set() const noexcept { return union_; }

  EvaluationContext context() const { return {snapshot_, reach_, improvement_, regression_}; }

  SupportSet impact_support_set() const;
  StrategyEvaluation impact_row() const;

  /// Monte Carlo baselines for the union selection, improvement then regression.
  std::vector<BaselineResult> baselines() const;

  ComparisonReport compare_with_pagerank() const;

 private:
  EcosystemSnapshot snapshot_;
  AnalysisConfig config_;
  std::string hash_;
  DependencyGraph graph_;
  ReachTable reach_;
  PageRankScores pagerank_;
  ImpactReport improvement_;
  ImpactReport regression_;
  SelectionResult improvement_selection_;
  SelectionResult regression_selection_;
  std::vector<std::string> union_;
};

inline constexpr std::string_view kImpactDrivenLabel = "impact-driven";

}  // namespace ecoimpact
