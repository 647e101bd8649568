#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecoimpact/graph.hpp"
#include "ecoimpact/impact.hpp"

namespace ecoimpact {

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-10;
  int max_iter = 200;
};

/// PageRank over dependent -> dependency edges, indexed by node id.
struct PageRankScores {
  std::vector<std::string> names;
  std::vector<double> scores;
  double damping = 0.85;
  int iterations_used = 0;
  double residual = 0.0;
  bool converged = false;

  double at(const std::string& name) const;
};

/// Power iteration; dangling mass is spread uniformly. Returns the last
/// iterate with `converged == false` when max_iter is exhausted.
PageRankScores pagerank(const DependencyGraph& graph, const PageRankOptions& options = {});

/// The k highest-scoring names, ties by name.
std::vector<std::string> top_k(const PageRankScores& scores, std::size_t k);

/// |a & b| / |a | b|; 1 for two empty sets. Inputs need not be sorted.
double jaccard(std::vector<std::string> a, std::vector<std::string> b);

/// Product-moment correlation. Throws Domain on size mismatch, fewer than
/// three pairs, non-finite values or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values receive the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct ScenarioComparison {
  std::string label;
  double impact_set_share = 0.0;
  double pagerank_set_share = 0.0;
  /// Empty when undefined (fewer than three scored packages or zero variance).
  std::optional<double> spearman;
  std::optional<double> pearson;
};

struct ComparisonReport {
  std::size_t k = 0;
  std::vector<std::string> impact_set;
  std::vector<std::string> pagerank_set;
  double jaccard = 0.0;
  std::vector<std::string> only_in_impact;
  std::vector<std::string> only_in_pagerank;
  std::vector<ScenarioComparison> scenarios;
  std::size_t correlated_packages = 0;  // packages with a score
  std::size_t uncorrelated_packages = 0;
};

/// Compares the impact-driven set with the PageRank top-|impact_set| under
/// identical budget. `reports` must be normalized.
ComparisonReport budget_matched_compare(const std::vector<ImpactReport>& reports,
                                        const PageRankScores& scores, const std::vector<std::string>& impact_set);

void write_pagerank_csv(const PageRankScores& scores, std::ostream& out);
void write_comparison_table(const ComparisonReport& report, std::ostream& out);

}  // namespace ecoimpact
