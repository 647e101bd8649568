#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace fixtures {

std::string node_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "pkg-%06zu", i);
  return buf;
}

Graph random_graph(std::size_t n, std::size_t m, std::mt19937_64& rng, bool acyclic) {
  Graph g{n, {}};
  if (n < 2) return g;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  const std::size_t max_edges = acyclic ? n * (n - 1) / 2 : n * (n - 1);
  m = std::min(m, max_edges);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  while (seen.size() < m) {
    auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (acyclic && a < b) std::swap(a, b);
    seen.emplace(a, b);
  }
  g.edges.assign(seen.begin(), seen.end());
  return g;
}

Graph random_graph_with_cycles(std::size_t n, std::size_t m, std::size_t cycles, std::mt19937_64& rng) {
  Graph g = random_graph(n, m, rng, true);
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen(g.edges.begin(), g.edges.end());
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  std::uniform_int_distribution<int> length(2, 5);
  for (std::size_t c = 0; c < cycles && n >= 2; ++c) {
    const int len = std::min<int>(length(rng), static_cast<int>(n));
    std::vector<std::uint32_t> members;
    while (static_cast<int>(members.size()) < len) {
      const auto v = pick(rng);
      if (std::find(members.begin(), members.end(), v) == members.end()) members.push_back(v);
    }
    for (int i = 0; i < len; ++i) seen.emplace(members[i], members[(i + 1) % len]);
  }
  g.edges.assign(seen.begin(), seen.end());
  return g;
}

Graph zipf_graph(std::size_t n, double exponent, std::mt19937_64& rng) {
  Graph g{n, {}};
  std::vector<double> cumulative;
  cumulative.reserve(n);
  std::uniform_int_distribution<int> fanout(2, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::size_t v = 0; v < n; ++v) {
    if (v > 0) {
      const int deps = std::min<int>(fanout(rng), static_cast<int>(v));
      for (int d = 0; d < deps; ++d) {
        const double u = unit(rng) * cumulative.back();
        const auto target = static_cast<std::uint32_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        seen.emplace(static_cast<std::uint32_t>(v), std::min<std::uint32_t>(target, static_cast<std::uint32_t>(v - 1)));
      }
    }
    const double w = std::pow(static_cast<double>(v + 1), -exponent);
    cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + w);
  }
  g.edges.assign(seen.begin(), seen.end());
  return g;
}

ecoimpact::EcosystemSnapshot make_snapshot(const Graph& g, const std::vector<PackageTraits>& traits) {
  std::map<std::string, ecoimpact::PackageRecord> packages;
  for (std::size_t i = 0; i < g.n; ++i) {
    ecoimpact::PackageRecord p;
    p.name = p.raw_name = node_name(i);
    const PackageTraits t = i < traits.size() ? traits[i] : PackageTraits{};
    p.maintained_score = t.score;
    p.has_repository_link = t.repo || t.owner.has_value();
    p.has_contact_info = t.contact;
    p.has_donation_link = t.donation;
    p.repository_owner = t.owner;
    packages.emplace(p.name, std::move(p));
  }
  std::vector<ecoimpact::Edge> edges;
  for (const auto& [a, b] : g.edges) edges.emplace_back(node_name(a), node_name(b));
  return ecoimpact::EcosystemSnapshot(std::move(packages), std::move(edges), {});
}

ecoimpact::EcosystemSnapshot scored_snapshot(const Graph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> score(0.0, 10.0);
  std::vector<PackageTraits> traits(g.n);
  for (auto& t : traits) t.score = score(rng);
  return make_snapshot(g, traits);
}

ecoimpact::EcosystemSnapshot zipf_ecosystem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Graph g = zipf_graph(5000, 1.5, rng);
  return scored_snapshot(g, rng);
}

}  // namespace fixtures
