#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ecoimpact/snapshot.hpp"
#include "support/oracles.hpp"

namespace fixtures {

struct Graph {
  std::size_t n = 0;
  oracle::EdgeList edges;  // unique, no self-loops
};

/// Zero-padded names so lexicographic order equals index order.
std::string node_name(std::size_t i);

/// Uniform random simple digraph; `acyclic` restricts edges to i -> j with i > j.
Graph random_graph(std::size_t n, std::size_t m, std::mt19937_64& rng, bool acyclic = false);

/// Random graph plus a few planted directed cycles.
Graph random_graph_with_cycles(std::size_t n, std::size_t m, std::size_t cycles, std::mt19937_64& rng);

/// Heavy-tailed dependency network: every package depends on 2-5 earlier
/// packages picked with probability proportional to (index+1)^-exponent.
Graph zipf_graph(std::size_t n, double exponent, std::mt19937_64& rng);

struct PackageTraits {
  std::optional<double> score;
  bool repo = true;
  bool contact = true;
  bool donation = false;
  std::optional<ecoimpact::OwnerRef> owner;
};

ecoimpact::EcosystemSnapshot make_snapshot(const Graph& g, const std::vector<PackageTraits>& traits);

/// Graph with uniform-random scores in [0,10] for every package.
ecoimpact::EcosystemSnapshot scored_snapshot(const Graph& g, std::mt19937_64& rng);

/// The 5,000-package synthetic ecosystem used for concentration checks.
ecoimpact::EcosystemSnapshot zipf_ecosystem(std::uint64_t seed = 42);

}  // namespace fixtures
