#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ecoimpact/centrality.hpp"
#include "ecoimpact/error.hpp"
#include "ecoimpact/numeric.hpp"

namespace ecoimpact {

double PageRankScores::at(const std::string& name) const {
  auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) throw Error(ErrorKind::NotFound, "unknown package: " + name);
  return scores[static_cast<std::size_t>(it - names.begin())];
}

PageRankScores pagerank(const DependencyGraph& graph, const PageRankOptions& options) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw Error(ErrorKind::Domain, "pagerank of an empty graph");
  if (!(options.damping > 0.0 && options.damping < 1.0)) throw Error(ErrorKind::Domain, "damping must lie in (0,1)");

  const double d = options.damping;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, inv_n), next(n), contribution(n);

  PageRankScores result;
  result.names = graph.names();
  result.damping = d;
  result.residual = 0.0;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    CompensatedSum dangling;
    for (NodeId v = 0; v < n; ++v) {
      const auto out = graph.forward().degree(v);
      if (out == 0) {
        dangling.add(rank[v]);
        contribution[v] = 0.0;
      } else {
        contribution[v] = rank[v] / static_cast<double>(out);
      }
    }
    const double base = (1.0 - d) * inv_n + d * dangling.value() * inv_n;
    CompensatedSum residual;
    for (NodeId v = 0; v < n; ++v) {
      CompensatedSum incoming;
      for (NodeId u : graph.reverse()[v]) incoming.add(contribution[u]);
      next[v] = base + d * incoming.value();
      residual.add(std::abs(next[v] - rank[v]));
    }
    rank.swap(next);
    result.iterations_used = iter;
    result.residual = residual.value();
    if (result.residual < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.scores = std::move(rank);
  return result;
}

std::vector<std::string> top_k(const PageRankScores& scores, std::size_t k) {
  if (k > scores.scores.size()) throw Error(ErrorKind::Domain, "k exceeds the number of packages");
  std::vector<std::size_t> order(scores.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores.scores[a] != scores.scores[b]) return scores.scores[a] > scores.scores[b];
                      return scores.names[a] < scores.names[b];
                    });
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(scores.names[order[i]]);
  return out;
}

double jaccard(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::string> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const auto inter = common.size();
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::Domain, "correlation inputs differ in length");
  if (x.size() < 3) throw Error(ErrorKind::Domain, "correlation needs at least three pairs");
  const auto n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error(ErrorKind::Domain, "non-finite correlation input");
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  CompensatedSum sxx, syy, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx.add(dx * dx);
    syy.add(dy * dy);
    sxy.add(dx * dy);
  }
  if (sxx.value() == 0.0 || syy.value() == 0.0) {
    throw Error(ErrorKind::Domain, "correlation undefined for zero variance");
  }
  return std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::Domain, "correlation inputs differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error(ErrorKind::Domain, "non-finite correlation input");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

namespace {

double set_share(const ImpactReport& report, const std::vector<std::string>& members) {
  std::vector<std::string> sorted(members);
  std::sort(sorted.begin(), sorted.end());
  CompensatedSum s;
  for (const auto& name : sorted) s.add(report.share(name));
  return s.value();
}

}  // namespace

ComparisonReport budget_matched_compare(const std::vector<ImpactReport>& reports, const PageRankScores& scores,
                                        const std::vector<std::string>& impact_set) {
  ComparisonReport out;
  out.impact_set = impact_set;
  std::sort(out.impact_set.begin(), out.impact_set.end());
  out.impact_set.erase(std::unique(out.impact_set.begin(), out.impact_set.end()), out.impact_set.end());
  out.k = out.impact_set.size();
  out.pagerank_set = top_k(scores, out.k);
  std::sort(out.pagerank_set.begin(), out.pagerank_set.end());
  out.jaccard = jaccard(out.impact_set, out.pagerank_set);
  std::set_difference(out.impact_set.begin(), out.impact_set.end(), out.pagerank_set.begin(), out.pagerank_set.end(),
                      std::back_inserter(out.only_in_impact));
  std::set_difference(out.pagerank_set.begin(), out.pagerank_set.end(), out.impact_set.begin(), out.impact_set.end(),
                      std::back_inserter(out.only_in_pagerank));

  for (const auto& report : reports) {
    if (!report.is_normalized()) throw Error(ErrorKind::Domain, "impact report is not normalized");
    if (report.names != scores.names) throw Error(ErrorKind::Domain, "pagerank scores do not match impact report");
    ScenarioComparison row;
    row.label = report.label;
    row.impact_set_share = set_share(report, out.impact_set);
    row.pagerank_set_share = set_share(report, out.pagerank_set);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < report.names.size(); ++i) {
      if (!report.scored[i]) continue;
      x.push_back(scores.scores[i]);
      y.push_back(report.normalized[i]);
    }
    out.correlated_packages = x.size();
    out.uncorrelated_packages = report.names.size() - x.size();
    try {
      row.spearman = spearman(x, y);
      row.pearson = pearson(x, y);
    } catch (const Error&) {
      row.spearman.reset();
      row.pearson.reset();
    }
    out.scenarios.push_back(std::move(row));
  }
  return out;
}

void write_pagerank_csv(const PageRankScores& scores, std::ostream& out) {
  out << "package,score\n";
  for (std::size_t i = 0; i < scores.names.size(); ++i) out << scores.names[i] << ',' << format_real(scores.scores[i]) << '\n';
}

void write_comparison_table(const ComparisonReport& report, std::ostream& out) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << "Budget-matched comparison (k = " << report.k << ")\n";
  out << "  Jaccard overlap:          " << std::fixed << std::setprecision(2) << report.jaccard * 100.0 << "%\n";
  out << "  Only impact-driven:       " << report.only_in_impact.size() << "\n";
  out << "  Only PageRank:            " << report.only_in_pagerank.size() << "\n";
  out << "  Correlated packages:      " << report.correlated_packages << " (" << report.uncorrelated_packages
      << " without score)\n";
  out << "  " << std::left << std::setw(14) << "scenario" << std::right << std::setw(14) << "impact set" << std::setw(14)
      << "PageRank set" << std::setw(10) << "r_s" << std::setw(10) << "r_p" << "\n";
  for (const auto& row : report.scenarios) {
    auto corr = [](const std::optional<double>& v) {
      if (!v) return std::string("n/a");
      std::ostringstream s;
      s << std::fixed << std::setprecision(2) << *v;
      return s.str();
    };
    out << "  " << std::left << std::setw(14) << row.label << std::right << std::setw(13) << std::fixed
        << std::setprecision(2) << row.impact_set_share * 100.0 << "%" << std::setw(13) << row.pagerank_set_share * 100.0
        << "%" << std::setw(10) << corr(row.spearman) << std::setw(10) << corr(row.pearson) << "\n";
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace ecoimpact
