#include <algorithm>
#include <bit>
#include <ostream>
#include <thread>

#include "ecoimpact/error.hpp"
#include "ecoimpact/graph.hpp"

namespace ecoimpact {

Adjacency::Adjacency(std::size_t node_count, const std::vector<std::pair<NodeId, NodeId>>& edges)
    : offsets_(node_count + 1, 0), targets_(edges.size()) {
  for (const auto& [from, to] : edges) ++offsets_[from + 1];
  for (std::size_t v = 0; v < node_count; ++v) offsets_[v + 1] += offsets_[v];
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [from, to] : edges) targets_[cursor[from]++] = to;
  for (std::size_t v = 0; v < node_count; ++v) {
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
  }
}

std::vector<std::pair<NodeId, NodeId>> Adjacency::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count());
  for (NodeId v = 0; v < node_count(); ++v) {
    for (NodeId w : (*this)[v]) out.emplace_back(v, w);
  }
  return out;
}

DependencyGraph::DependencyGraph(std::vector<std::string> names,
                                 const std::vector<std::pair<NodeId, NodeId>>& edges)
    : names_(std::move(names)), forward_(names_.size(), edges) {
  index_.reserve(names_.size());
  for (NodeId i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
  std::vector<std::pair<NodeId, NodeId>> transposed;
  transposed.reserve(edges.size());
  for (const auto& [from, to] : edges) transposed.emplace_back(to, from);
  reverse_ = Adjacency(names_.size(), transposed);
}

std::optional<NodeId> DependencyGraph::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId DependencyGraph::id(const std::string& name) const {
  if (auto found = find(name)) return *found;
  throw Error(ErrorKind::NotFound, "unknown package: " + name);
}

std::uint64_t ReachTable::at(const std::string& name) const {
  auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) throw Error(ErrorKind::NotFound, "unknown package: " + name);
  return reach[static_cast<std::size_t>(it - names.begin())];
}

DependencyGraph build_graph(const EcosystemSnapshot& snapshot) {
  std::vector<std::string> names;
  names.reserve(snapshot.package_count());
  for (const auto& [name, record] : snapshot.packages()) names.push_back(name);

  std::unordered_map<std::string, NodeId> index;
  index.reserve(names.size());
  for (NodeId i = 0; i < names.size(); ++i) index.emplace(names[i], i);

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(snapshot.edge_count());
  for (const auto& [from, to] : snapshot.edges()) edges.emplace_back(index.at(from), index.at(to));
  return DependencyGraph(std::move(names), edges);
}

CondensedDag condense(const DependencyGraph& graph) {
  const std::size_t n = graph.node_count();
  const Adjacency& adj = graph.forward();
  constexpr std::uint32_t kUnvisited = UINT32_MAX;

  // Iterative Tarjan.
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), raw_component(n, kUnvisited);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeId> stack;
  std::vector<std::pair<NodeId, std::size_t>> call;  // (node, next neighbour position)
  std::uint32_t counter = 0, components = 0;

  for (NodeId start = 0; start < n; ++start) {
    if (index[start] != kUnvisited) continue;
    call.emplace_back(start, 0);
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      const auto neighbours = adj[v];
      if (pos < neighbours.size()) {
        const NodeId w = neighbours[pos++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const NodeId done = v;
      call.pop_back();
      if (!call.empty()) {
        const NodeId parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          raw_component[w] = components;
        } while (w != done);
        ++components;
      }
    }
  }

  // Renumber components by smallest member id.
  std::vector<std::uint32_t> renumber(components, kUnvisited);
  std::uint32_t next = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (renumber[raw_component[v]] == kUnvisited) renumber[raw_component[v]] = next++;
  }

  CondensedDag dag;
  dag.component_of.resize(n);
  dag.component_sizes.assign(components, 0);
  dag.members.resize(components);
  for (NodeId v = 0; v < n; ++v) {
    const auto c = renumber[raw_component[v]];
    dag.component_of[v] = c;
    ++dag.component_sizes[c];
    dag.members[c].push_back(v);
  }

  std::vector<std::pair<NodeId, NodeId>> cedges;
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w : adj[v]) {
      const auto cv = dag.component_of[v], cw = dag.component_of[w];
      if (cv != cw) cedges.emplace_back(cv, cw);
    }
  }
  std::sort(cedges.begin(), cedges.end());
  cedges.erase(std::unique(cedges.begin(), cedges.end()), cedges.end());
  dag.dag_edges = Adjacency(components, cedges);

  // Kahn's algorithm; ready components are taken in id order.
  std::vector<std::uint32_t> indegree(components, 0);
  for (const auto& [from, to] : cedges) ++indegree[to];
  std::vector<std::uint32_t> ready;
  for (std::uint32_t c = 0; c < components; ++c) {
    if (indegree[c] == 0) ready.push_back(c);
  }
  std::reverse(ready.begin(), ready.end());
  dag.topological_order.reserve(components);
  while (!ready.empty()) {
    const auto c = ready.back();
    ready.pop_back();
    dag.topological_order.push_back(c);
    const auto succ = dag.dag_edges[c];
    for (auto it = succ.rbegin(); it != succ.rend(); ++it) {
      if (--indegree[*it] == 0) ready.push_back(*it);
    }
  }
  if (dag.topological_order.size() != components) {
    throw Error(ErrorKind::Domain, "internal: condensation is not acyclic");
  }
  return dag;
}

namespace {

// Counts, for every component, how many roots in [first, last) reach it.
// Bit i of a component's row is set when node first+i has it in its closure.
void count_block(const CondensedDag& dag, NodeId first, NodeId last, std::vector<std::uint64_t>& bits,
                 std::vector<char>& touched, std::vector<std::uint64_t>& counts) {
  const std::size_t words = (static_cast<std::size_t>(last - first) + 63) / 64;
  const std::size_t components = dag.component_count();
  std::fill(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(components * words), 0);
  std::fill(touched.begin(), touched.end(), 0);

  for (NodeId v = first; v < last; ++v) {
    const auto c = dag.component_of[v];
    const std::size_t bit = v - first;
    bits[c * words + bit / 64] |= std::uint64_t{1} << (bit % 64);
    touched[c] = 1;
  }
  for (const auto c : dag.topological_order) {
    if (!touched[c]) continue;
    const std::uint64_t* src = bits.data() + c * words;
    std::uint64_t total = 0;
    for (std::size_t w = 0; w < words; ++w) total += static_cast<std::uint64_t>(std::popcount(src[w]));
    counts[c] += total;
    for (const auto d : dag.dag_edges[c]) {
      std::uint64_t* dst = bits.data() + d * words;
      for (std::size_t w = 0; w < words; ++w) dst[w] |= src[w];
      touched[d] = 1;
    }
  }
}

}  // namespace

ReachTable reach_counts(const DependencyGraph& graph, const ReachOptions& options) {
  return reach_counts(graph, condense(graph), options);
}

ReachTable reach_counts(const DependencyGraph& graph, const CondensedDag& dag, const ReachOptions& options) {
  const std::size_t n = graph.node_count();
  const std::size_t components = dag.component_count();
  ReachTable table{graph.names(), std::vector<std::uint64_t>(n, 0)};
  if (n == 0) return table;

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t max_words = (n + 63) / 64;
  const std::size_t per_thread = options.memory_budget_bytes / threads;
  std::size_t words = std::clamp<std::size_t>(per_thread / (components * sizeof(std::uint64_t)), 1, max_words);
  const std::size_t block = words * 64;
  const std::size_t blocks = (n + block - 1) / block;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));

  std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(components, 0));
  auto worker = [&](unsigned t) {
    std::vector<std::uint64_t> bits(components * words);
    std::vector<char> touched(components);
    for (std::size_t b = t; b < blocks; b += threads) {
      const auto first = static_cast<NodeId>(b * block);
      const auto last = static_cast<NodeId>(std::min(n, (b + 1) * block));
      count_block(dag, first, last, bits, touched, partial[t]);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }

  std::vector<std::uint64_t> per_component(components, 0);
  for (const auto& counts : partial) {
    for (std::size_t c = 0; c < components; ++c) per_component[c] += counts[c];
  }
  for (NodeId v = 0; v < n; ++v) table.reach[v] = per_component[dag.component_of[v]];
  return table;
}

std::vector<NodeId> closure_ids(const DependencyGraph& graph, NodeId root) {
  std::vector<char> seen(graph.node_count(), 0);
  std::vector<NodeId> out{root};
  seen[root] = 1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (NodeId w : graph.forward()[out[i]]) {
      if (!seen[w]) {
        seen[w] = 1;
        out.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> closure(const DependencyGraph& graph, const std::string& root) {
  std::vector<std::string> out;
  for (NodeId v : closure_ids(graph, graph.id(root))) out.push_back(graph.name(v));
  return out;
}

void write_reach_csv(const ReachTable& table, std::ostream& out) {
  out << "package,reach\n";
  for (std::size_t i = 0; i < table.size(); ++i) out << table.names[i] << ',' << table.reach[i] << '\n';
}

}  // namespace ecoimpact
