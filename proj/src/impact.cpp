#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "ecoimpact/error.hpp"
#include "ecoimpact/impact.hpp"
#include "ecoimpact/numeric.hpp"

namespace ecoimpact {

namespace {

// Tolerance when checking that before + delta stays within the score range.
constexpr double kScoreSlack = 1e-9;

Scenario preset(const EcosystemSnapshot& snapshot, const std::set<std::string>* members, const char* label,
                double target) {
  Scenario s;
  s.label = label;
  for (const auto& [name, record] : snapshot.packages()) {
    if (!record.maintained_score) continue;
    if (members && !members->count(name)) continue;
    s.deltas.emplace(name, target - *record.maintained_score);
  }
  return s;
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) throw Error(ErrorKind::NotFound, "unknown package: " + name);
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

Scenario improvement_scenario(const EcosystemSnapshot& snapshot) {
  return preset(snapshot, nullptr, "improvement", kMaxScore);
}

Scenario regression_scenario(const EcosystemSnapshot& snapshot) {
  return preset(snapshot, nullptr, "regression", kMinScore);
}

Scenario improvement_scenario(const EcosystemSnapshot& snapshot, const std::set<std::string>& members) {
  return preset(snapshot, &members, "improvement", kMaxScore);
}

Scenario regression_scenario(const EcosystemSnapshot& snapshot, const std::set<std::string>& members) {
  return preset(snapshot, &members, "regression", kMinScore);
}

std::map<std::string, double> snapshot_scores(const EcosystemSnapshot& snapshot) {
  std::map<std::string, double> scores;
  for (const auto& [name, record] : snapshot.packages()) {
    if (record.maintained_score) scores.emplace(name, *record.maintained_score);
  }
  return scores;
}

EcosystemState ecosystem_state(const ReachTable& reach, const std::map<std::string, double>& scores) {
  for (const auto& [name, score] : scores) {
    if (!(score >= kMinScore && score <= kMaxScore)) {
      throw Error(ErrorKind::Domain, "score for " + name + " outside [0,10]");
    }
    index_of(reach.names, name);
  }
  EcosystemState state;
  CompensatedSum sum;
  for (std::size_t i = 0; i < reach.size(); ++i) {
    auto it = scores.find(reach.names[i]);
    if (it == scores.end()) {
      state.excluded.push_back(reach.names[i]);
      continue;
    }
    sum.add(static_cast<double>(reach.reach[i]) * it->second);
  }
  state.value = sum.value();
  return state;
}

EcosystemState ecosystem_state(const EcosystemSnapshot& snapshot, const ReachTable& reach) {
  return ecosystem_state(reach, snapshot_scores(snapshot));
}

double ImpactReport::share(const std::string& name) const {
  const auto i = index_of(names, name);
  return normalized.empty() ? 0.0 : normalized[i];
}

ImpactReport impact(const EcosystemSnapshot& snapshot, const ReachTable& reach, const Scenario& scenario) {
  if (reach.size() != snapshot.package_count()) {
    throw Error(ErrorKind::Domain, "reach table does not match snapshot");
  }
  const std::size_t n = reach.size();
  ImpactReport report;
  report.label = scenario.label;
  report.names = reach.names;
  report.reach = reach.reach;
  report.delta.assign(n, 0.0);
  report.raw_impact.assign(n, 0.0);
  report.scored.assign(n, 0);

  for (const auto& [name, d] : scenario.deltas) {
    const auto i = index_of(report.names, name);
    const auto& score = snapshot.at(name).maintained_score;
    if (!std::isfinite(d)) throw Error(ErrorKind::Domain, "non-finite delta for " + name);
    if (!score) {
      if (d != 0.0) throw Error(ErrorKind::Domain, "delta given for unscored package " + name);
      continue;
    }
    const double after = *score + d;
    if (after < kMinScore - kScoreSlack || after > kMaxScore + kScoreSlack) {
      throw Error(ErrorKind::Domain, "delta moves " + name + " outside [0,10]");
    }
    report.delta[i] = d;
  }

  CompensatedSum node_order;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& record = snapshot.at(report.names[i]);
    if (!record.maintained_score) {
      report.excluded.push_back(report.names[i]);
      continue;
    }
    report.scored[i] = 1;
    report.raw_impact[i] = report.delta[i] * static_cast<double>(report.reach[i]);
    report.ranking.push_back(static_cast<NodeId>(i));
    node_order.add(report.raw_impact[i]);
  }

  // Shares are impact / total, so descending share means descending impact
  // for a positive total and ascending impact for a negative one.
  const double sign = node_order.value() < 0.0 ? -1.0 : 1.0;
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](NodeId a, NodeId b) {
    return sign * report.raw_impact[a] > sign * report.raw_impact[b];
  });
  CompensatedSum ranked_order;
  for (const auto i : report.ranking) ranked_order.add(report.raw_impact[i]);
  report.total = ranked_order.value();
  return report;
}

ImpactReport normalize(ImpactReport report) {
  if (report.total == 0.0) {
    throw Error(ErrorKind::DegenerateScenario,
                "scenario '" + report.label + "' induces zero total impact; shares are undefined");
  }
  report.normalized.assign(report.names.size(), 0.0);
  for (std::size_t i = 0; i < report.names.size(); ++i) {
    if (report.raw_impact[i] != 0.0) report.normalized[i] = report.raw_impact[i] / report.total;
  }
  return report;
}

std::vector<std::string> SelectionResult::selected() const {
  std::vector<std::string> out;
  out.reserve(selected_count);
  for (std::size_t i = 0; i < selected_count; ++i) out.push_back(ranked[i].package);
  return out;
}

SelectionResult select_to_threshold(const ImpactReport& report, double tau, const SelectionOptions& options) {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorKind::Domain, "tau must lie in (0,1]");
  if (!report.is_normalized()) throw Error(ErrorKind::Domain, "impact report is not normalized");
  for (const auto& name : options.pinned) {
    index_of(report.names, name);
    if (options.excluded.count(name)) throw Error(ErrorKind::Domain, "package both pinned and excluded: " + name);
  }
  for (const auto& name : options.excluded) index_of(report.names, name);

  std::vector<NodeId> order;
  std::vector<char> placed(report.names.size(), 0);
  if (!options.pinned.empty()) {
    for (const auto i : report.ranking) {
      if (options.pinned.count(report.names[i])) {
        order.push_back(i);
        placed[i] = 1;
      }
    }
    for (const auto& name : options.pinned) {
      const auto i = static_cast<NodeId>(index_of(report.names, name));
      if (!placed[i]) {
        order.push_back(i);
        placed[i] = 1;
      }
    }
  }
  for (const auto i : report.ranking) {
    if (!placed[i] && !options.excluded.count(report.names[i])) order.push_back(i);
  }

  SelectionResult result;
  result.label = report.label;
  result.tau = tau;
  result.ranked.reserve(order.size());
  // Once every nonzero entry is in, the prefix is the whole total; pinning
  // reorders the sum, so snap to 1 instead of trusting the last ulp.
  std::size_t pending = 0;
  bool complete = true;
  for (std::size_t i = 0; i < report.names.size(); ++i) {
    if (report.raw_impact[i] == 0.0) continue;
    if (options.excluded.count(report.names[i])) complete = false;
    ++pending;
  }
  CompensatedSum running;
  bool reached = false;
  for (const auto i : order) {
    running.add(report.raw_impact[i]);
    if (report.raw_impact[i] != 0.0) --pending;
    const double cumulative = complete && pending == 0 ? 1.0 : running.value() / report.total;
    result.ranked.push_back({report.names[i], report.normalized[i], cumulative});
    if (!reached && cumulative >= tau) {
      reached = true;
      result.selected_count = result.ranked.size();
      result.achieved_share = cumulative;
    }
  }
  if (!reached) {
    throw Error(ErrorKind::Unreachable, "no selection reaches tau = " + format_real(tau) + " (maximum " +
                                            format_real(result.ranked.empty() ? 0.0 : result.ranked.back().cumulative) +
                                            ")");
  }
  return result;
}

std::vector<std::string> union_selection(const SelectionResult& improvement, const SelectionResult& regression) {
  std::set<std::string> members;
  for (const auto& name : improvement.selected()) members.insert(name);
  for (const auto& name : regression.selected()) members.insert(name);
  return {members.begin(), members.end()};
}

std::string BaselineResult::p_display() const {
  if (at_least_observed == 0) {
    // fixed notation with a few significant digits, trailing zeros dropped
    std::ostringstream out;
    out << std::fixed << std::setprecision(static_cast<int>(std::to_string(n_trials).size()) + 2)
        << 1.0 / static_cast<double>(n_trials);
    auto text = out.str();
    text.erase(text.find_last_not_of('0') + 1);
    if (text.back() == '.') text.pop_back();
    return "< " + text;
  }
  return format_real(p_upper_bound);
}

BaselineResult random_baseline(const ImpactReport& report, const std::vector<std::string>& observed,
                               const BaselineOptions& options) {
  if (!report.is_normalized()) throw Error(ErrorKind::Domain, "impact report is not normalized");
  if (options.n_trials < 1) throw Error(ErrorKind::Domain, "n_trials must be at least 1");

  std::vector<NodeId> population(report.ranking.begin(), report.ranking.end());
  std::sort(population.begin(), population.end());

  std::vector<NodeId> observed_ids;
  for (const auto& name : observed) {
    const auto i = index_of(report.names, name);
    if (!report.scored[i]) throw Error(ErrorKind::Domain, "observed package has no score: " + name);
    observed_ids.push_back(static_cast<NodeId>(i));
  }
  std::sort(observed_ids.begin(), observed_ids.end());
  observed_ids.erase(std::unique(observed_ids.begin(), observed_ids.end()), observed_ids.end());

  const std::size_t k = observed_ids.size();
  const std::size_t pop = population.size();
  if (k > pop) throw Error(ErrorKind::Domain, "set size exceeds the scored population");

  auto set_share = [&](const std::vector<NodeId>& ids) {
    CompensatedSum s;
    for (const auto i : ids) s.add(report.normalized[i]);
    return s.value();
  };

  BaselineResult result;
  result.label = report.label;
  result.n_trials = options.n_trials;
  result.seed = options.seed;
  result.set_size = k;
  result.population = pop;
  result.observed_impact = set_share(observed_ids);

  std::vector<double> trials(options.n_trials);
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, options.n_trials));

  auto worker = [&](unsigned t) {
    std::vector<char> taken(pop, 0);
    std::vector<std::size_t> picks;
    std::vector<NodeId> ids;
    picks.reserve(k);
    ids.reserve(k);
    for (std::uint64_t trial = t; trial < options.n_trials; trial += threads) {
      auto rng = trial_generator(options.seed, trial);
      // Floyd's sampling: k distinct positions out of pop.
      picks.clear();
      for (std::size_t j = pop - k; j < pop; ++j) {
        const auto r = static_cast<std::size_t>(uniform_below(rng, j + 1));
        const std::size_t pick = taken[r] ? j : r;
        taken[pick] = 1;
        picks.push_back(pick);
      }
      std::sort(picks.begin(), picks.end());
      ids.clear();
      for (const auto p : picks) {
        ids.push_back(population[p]);
        taken[p] = 0;
      }
      trials[trial] = set_share(ids);
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }

  CompensatedSum sum;
  for (const double x : trials) sum.add(x);
  result.mean = sum.value() / static_cast<double>(options.n_trials);
  const auto [lo, hi] = std::minmax_element(trials.begin(), trials.end());
  if (*lo == *hi || options.n_trials < 2) {
    result.std_dev = 0.0;
    result.mean = *lo == *hi ? *lo : result.mean;
  } else {
    CompensatedSum sq;
    for (const double x : trials) sq.add((x - result.mean) * (x - result.mean));
    result.std_dev = std::sqrt(sq.value() / static_cast<double>(options.n_trials - 1));
  }
  result.std_is_zero = result.std_dev == 0.0;
  result.z_score = result.std_is_zero ? 0.0 : (result.observed_impact - result.mean) / result.std_dev;
  result.at_least_observed = static_cast<std::uint64_t>(
      std::count_if(trials.begin(), trials.end(), [&](double x) { return x >= result.observed_impact; }));
  result.p_upper_bound = static_cast<double>(result.at_least_observed) / static_cast<double>(options.n_trials);
  return result;
}

std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

void write_impact_csv(const ImpactReport& report, std::ostream& out) {
  out << "package,reach,delta,impact,share\n";
  for (std::size_t i = 0; i < report.names.size(); ++i) {
    out << report.names[i] << ',' << report.reach[i] << ',' << format_real(report.delta[i]) << ','
        << format_real(report.raw_impact[i]) << ',' << (report.normalized.empty() ? "" : format_real(report.normalized[i]))
        << '\n';
  }
}

void write_selection_csv(const SelectionResult& selection, std::ostream& out) {
  out << "rank,package,share,cumulative\n";
  for (std::size_t i = 0; i < selection.selected_count; ++i) {
    const auto& e = selection.ranked[i];
    out << (i + 1) << ',' << e.package << ',' << format_real(e.share) << ',' << format_real(e.cumulative) << '\n';
  }
}

}  // namespace ecoimpact
