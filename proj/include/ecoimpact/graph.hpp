#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecoimpact/snapshot.hpp"

namespace ecoimpact {

using NodeId = std::uint32_t;

/// Compressed sparse row adjacency. Neighbour lists are sorted ascending.
class Adjacency {
 public:
  Adjacency() : offsets_(1, 0) {}
  Adjacency(std::size_t node_count, const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size(); }

  std::span<const NodeId> operator[](NodeId v) const noexcept {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  /// All (source, target) pairs in source-major order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// Package dependency network. Node ids follow lexicographic name order;
/// `forward` points from a dependent to its dependencies, `reverse` is its
/// transpose.
class DependencyGraph {
 public:
  DependencyGraph() = default;
  DependencyGraph(std::vector<std::string> names, const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::size_t node_count() const noexcept { return names_.size(); }
  std::size_t edge_count() const noexcept { return forward_.edge_count(); }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(NodeId id) const { return names_.at(id); }
  std::optional<NodeId> find(const std::string& name) const;
  NodeId id(const std::string& name) const;  // throws NotFound

  const Adjacency& forward() const noexcept { return forward_; }
  const Adjacency& reverse() const noexcept { return reverse_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  Adjacency forward_;
  Adjacency reverse_;
};

struct CondensedDag {
  std::vector<std::uint32_t> component_of;      // node -> component
  std::vector<std::uint32_t> component_sizes;   // component -> member count
  std::vector<std::vector<NodeId>> members;     // component -> sorted members
  Adjacency dag_edges;                          // component -> components it depends on
  std::vector<std::uint32_t> topological_order; // dependents before dependencies

  std::size_t component_count() const noexcept { return component_sizes.size(); }
};

/// Number of packages whose transitive dependency closure contains each
/// package, the package itself included. Indexed by node id.
struct ReachTable {
  std::vector<std::string> names;
  std::vector<std::uint64_t> reach;

  std::uint64_t at(const std::string& name) const;
  std::size_t size() const noexcept { return reach.size(); }
};

DependencyGraph build_graph(const EcosystemSnapshot& snapshot);

CondensedDag condense(const DependencyGraph& graph);

struct ReachOptions {
  /// Upper bound on the per-pass bitset working set. Larger graphs are
  /// processed in several exact passes over disjoint blocks of roots.
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
  unsigned threads = 0;  // 0 = hardware concurrency
};

ReachTable reach_counts(const DependencyGraph& graph, const ReachOptions& options = {});
ReachTable reach_counts(const DependencyGraph& graph, const CondensedDag& dag, const ReachOptions& options = {});

/// Transitive dependency closure of `root`, root included, sorted by name.
std::vector<std::string> closure(const DependencyGraph& graph, const std::string& root);
std::vector<NodeId> closure_ids(const DependencyGraph& graph, NodeId root);

void write_reach_csv(const ReachTable& table, std::ostream& out);

}  // namespace ecoimpact
